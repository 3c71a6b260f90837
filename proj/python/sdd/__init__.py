"""Seller-level detection of farmed transaction days."""

from ._core import (
    ConfigError,
    DataCollection,
    Error,
    SeparationError,
    detect_sddr,
    detect_sddr_plus,
    first_level,
    jsd,
    kl,
    make_dataset,
    metrics,
    optimal_threshold,
    run_experiment,
    second_level,
    sdde,
    mgof,
)

__all__ = [
    "ConfigError",
    "DataCollection",
    "Error",
    "SeparationError",
    "detect_sddr",
    "detect_sddr_plus",
    "first_level",
    "jsd",
    "kl",
    "make_dataset",
    "metrics",
    "optimal_threshold",
    "run_experiment",
    "second_level",
    "sdde",
    "mgof",
]
