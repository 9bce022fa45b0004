"""Independent reference values frozen into the C++ tests."""
from fractions import Fraction
from math import log2, sqrt
import statistics


def ngram_aab():
    p_a = Fraction(2 + 1, 3 + 256)
    p_b = Fraction(1 + 1, 3 + 256)
    return -log2(p_a) - log2(p_b)


def pearson_small():
    xs, ys = [1, 2, 3, 4], [2, 1, 4, 3]
    mx, my = sum(xs) / 4, sum(ys) / 4
    cov = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    return cov / sqrt(sum((x - mx) ** 2 for x in xs) * sum((y - my) ** 2 for y in ys))


def largest_remainder(probs, total=65536):
    ideal = [p * total for p in probs]
    f = [max(1, int(v)) for v in ideal]
    while sum(f) > total:
        i = max((i for i in range(len(f)) if f[i] > 1), key=lambda i: (f[i] - ideal[i], -i))
        f[i] -= 1
    short = total - sum(f)
    order = sorted(range(len(f)), key=lambda i: (-(ideal[i] - f[i]), i))
    for i in order[:short]:
        f[i] += 1
    assert sum(f) == total
    return f


def abracadabra():
    text = b"abracadabra"
    floor = 2.0 ** -60
    counts = {b: text.count(b) for b in set(text)}
    probs = [counts.get(i, 0) / len(text) for i in range(256)]
    probs = [max(p, floor) for p in probs]
    s = sum(probs)
    probs = [p / s for p in probs]
    f = largest_remainder(probs)
    return sum(-log2(f[b] / 65536) for b in text), {chr(b): f[b] for b in counts}


def outliers():
    vals = [5.0, 5.1, 4.9, 1.0]
    med = statistics.median(vals)
    mad = statistics.median(abs(v - med) for v in vals)
    return med, mad, med - 3 * mad


if __name__ == "__main__":
    print("aab order-0 nll bits", repr(ngram_aab()))
    print("pearson small", repr(pearson_small()))
    print("thirds", largest_remainder([1 / 3] * 3))
    print("abracadabra", abracadabra())
    print("outliers", outliers())
    print("llama avg", round(sum([83.8, 67.6, 37.6, 72.1, 54.6]) / 5, 1))
    print("deepseek avg", round(sum([76.1, 52.5, 20.1, 52.9, 43.1]) / 5, 1))
