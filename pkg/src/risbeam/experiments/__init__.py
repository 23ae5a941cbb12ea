"""Experiment harness: deterministic CSV producers and a CLI."""

from .config import ExperimentConfig, load_config, save_config, system_config
from .plots import emit_plots
from .runner import (
    ResultRow,
    loglog_slope,
    run_convergence,
    run_sweep,
    run_timing,
    spearman,
    write_rows,
)

__all__ = [
    "ExperimentConfig",
    "ResultRow",
    "emit_plots",
    "load_config",
    "loglog_slope",
    "run_convergence",
    "run_sweep",
    "run_timing",
    "save_config",
    "spearman",
    "system_config",
    "write_rows",
]
