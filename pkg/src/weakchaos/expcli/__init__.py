"""Reproducible experiment runner: configuration, experiments, CSV/JSON output."""

from .config import ConfigError, InvalidParameters, RunConfig, UnknownExperiment, parse_config
from .emit import emit_series, emit_table
from .experiments import REGISTRY, NumericFailure, OutputDirError, RunSummary, run_experiment

__all__ = [
    "REGISTRY",
    "ConfigError",
    "InvalidParameters",
    "NumericFailure",
    "OutputDirError",
    "RunConfig",
    "RunSummary",
    "UnknownExperiment",
    "emit_series",
    "emit_table",
    "parse_config",
    "run_experiment",
]
