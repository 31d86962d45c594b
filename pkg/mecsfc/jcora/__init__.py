"""Joint offloading, service-function placement and clock allocation (GTDA)"""
from ._assignment import (
    Assignment,
    SolutionReport,
    SolverTrace,
    TraceRecord,
    offloaded_bits,
    save_solution,
    load_solution,
)
from ._local import local_allocation, split_local_offload
from ._master import (
    RemoteEstimate,
    PlacementResult,
    hop_budget,
    estimate_remote_alloc,
    estimate_offload_quote,
    place_functions_gtda,
)
from ._slave import SlaveSolution, solve_slave
from ._validate import ConstraintCheck, FeasibilityReport, validate
from ._solver import solve_jcora

__all__ = [
    "Assignment",
    "SolutionReport",
    "SolverTrace",
    "TraceRecord",
    "offloaded_bits",
    "save_solution",
    "load_solution",
    "local_allocation",
    "split_local_offload",
    "RemoteEstimate",
    "PlacementResult",
    "hop_budget",
    "estimate_remote_alloc",
    "estimate_offload_quote",
    "place_functions_gtda",
    "SlaveSolution",
    "solve_slave",
    "ConstraintCheck",
    "FeasibilityReport",
    "validate",
    "solve_jcora",
]
