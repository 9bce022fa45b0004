import math

import pytest

import lmcompress as lc


def test_tokenize_and_probability():
    m = lc.NGramModel(order=1, alpha=1.0, training_texts=["aaab"])
    assert m.tokenize("é") == [195, 169]
    assert m.probability([97], 97) == pytest.approx(3 / 259)


def test_plan_windows():
    assert lc.plan_windows(3000) == [(0, 1900, 0), (512, 2412, 1900), (1024, 2924, 2412), (1536, 3000, 2924)]


def test_round_trip():
    m = lc.NGramModel(order=3, training_texts=["hello world " * 20])
    data = b"hello there, world " * 50 + bytes(range(256))
    blob = lc.compress(data, m)
    assert lc.decompress(blob, m) == data
    other = lc.NGramModel(order=2)
    with pytest.raises(lc.FingerprintMismatch):
        lc.decompress(blob, other)


def test_bpc_uniform():
    m = lc.NGramModel(order=0)
    r = lc.evaluate_bpc([("a", "x" * 100), ("b", "y" * 50)], m)
    assert r["corpus_bpc"] == 8.0
    assert r["total_chars"] == 150


def test_min_k_and_outliers():
    assert lc.min_k_score([0.1, 0.5, 1.0, 2.0, 4.0], 20) == 4.0
    assert lc.min_k_score([1, 3], 100) == 2.0
    assert lc.flag_outliers({"a": 5.0, "b": 5.1, "c": 4.9, "d": 1.0})["flagged"] == {"d"}
    with pytest.raises(lc.ContractViolation):
        lc.min_k_score([], 20)


def test_statistics():
    assert lc.pearson([1, 2, 3, 4], [2, 1, 4, 3]) == pytest.approx(0.6)
    fit = lc.fit_linear([0, 1, 2], [1, 3, 5])
    assert fit["slope"] == pytest.approx(2.0)
    assert fit["rmse"] == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(lc.DataError):
        lc.pearson([1, 1, 1], [1, 2, 3])


def test_reproduce_tables():
    r = lc.reproduce_tables()
    assert r["all_pass"]
    knowledge = [c for c in r["checks"] if c["area"] == "knowledge" and c["benchmark"] == "Average"]
    rho = next(c for c in knowledge if c["statistic"] == "pearson_rho")
    assert math.isclose(rho["computed"], -0.933, abs_tol=0.005)


def test_score_window():
    m = lc.NGramModel(order=0)
    assert m.score_window([1, 2, 3, 4]) == [8.0, 8.0, 8.0, 8.0]
