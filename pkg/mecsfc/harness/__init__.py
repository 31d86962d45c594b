"""Seeded parameter sweeps over scenarios and algorithms"""
from ._sweep import COLUMNS, SweepSpec, apply_parameter, parameter_field, run_sweep
from ._results import SweepResult, emit_results, read_results

__all__ = [
    "COLUMNS",
    "SweepSpec",
    "SweepResult",
    "apply_parameter",
    "parameter_field",
    "run_sweep",
    "emit_results",
    "read_results",
]
