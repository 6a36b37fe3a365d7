"""Experiment harness: trace ingestion and synthesis, sweep orchestration,
theorem verification, and the command-line interface."""

from .experiment import ExperimentConfig, ExperimentResult, run_experiment, run_sweep
from .traces import LoadedTrace, parse_trace_csv, synth_trace, write_trace_csv
from .verify import CheckResult, VerificationReport, verify_theorems

__all__ = [
    "CheckResult",
    "ExperimentConfig",
    "ExperimentResult",
    "LoadedTrace",
    "VerificationReport",
    "parse_trace_csv",
    "run_experiment",
    "run_sweep",
    "synth_trace",
    "verify_theorems",
    "write_trace_csv",
]
