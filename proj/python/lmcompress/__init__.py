"""Compression-based evaluation of language models: BPC, arithmetic coding,
MIN-K% PROB contamination checks and correlation analysis."""

from pathlib import Path

from ._lmcompress import (
    DEFAULT_CONTEXT,
    DEFAULT_K_PERCENT,
    DEFAULT_STRIDE,
    ContractViolation,
    CorruptionError,
    DataError,
    FingerprintMismatch,
    LmcError,
    NGramModel,
    ProtocolError,
    Provider,
    ProviderError,
    RemoteProvider,
    TokenizationError,
    TransportError,
    compress,
    decompress,
    evaluate_bpc,
    fit_linear,
    flag_outliers,
    min_k_score,
    pearson,
    plan_windows,
)
from ._lmcompress import BUILD_FIXTURE_DIR as _BUILD_FIXTURE_DIR
from ._lmcompress import reproduce_tables as _reproduce_tables


def fixture_dir() -> Path:
    """Bundled fixture tables, falling back to the source tree."""
    here = Path(__file__).parent / "fixtures"
    return here if here.is_dir() else Path(_BUILD_FIXTURE_DIR)


def reproduce_tables(directory=None):
    return _reproduce_tables(str(directory or fixture_dir()))


__all__ = [
    "DEFAULT_CONTEXT", "DEFAULT_K_PERCENT", "DEFAULT_STRIDE",
    "LmcError", "ContractViolation", "DataError", "CorruptionError", "FingerprintMismatch",
    "TokenizationError", "ProviderError", "TransportError", "ProtocolError",
    "Provider", "NGramModel", "RemoteProvider",
    "plan_windows", "compress", "decompress", "evaluate_bpc",
    "min_k_score", "flag_outliers", "pearson", "fit_linear",
    "fixture_dir", "reproduce_tables",
]
