"""Python access to the spiking cognitive-load toolkit."""

from ._cogload import (
    ConfigError,
    DataError,
    Error,
    NumericError,
    classify_burst,
    encode,
    metrics,
    quantize_int3,
    run_cli,
    synthetic,
)

__all__ = [
    "ConfigError",
    "DataError",
    "Error",
    "NumericError",
    "classify_burst",
    "encode",
    "metrics",
    "quantize_int3",
    "run_cli",
    "synthetic",
]
