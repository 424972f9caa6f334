"""Experiment orchestration: runs, sweeps and exports."""

from .export import export_run, restore_model
from .runner import conventions, load_dataset, report_frame, run_experiment, run_seed, save_report, sweep

__all__ = [
    "load_dataset",
    "conventions",
    "run_seed",
    "run_experiment",
    "report_frame",
    "save_report",
    "sweep",
    "restore_model",
    "export_run",
]
