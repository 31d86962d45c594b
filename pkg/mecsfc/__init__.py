from typing import Tuple, Union

# PEP0440 compatible formatted version, see:
# https://www.python.org/dev/peps/pep-0440/
#
# Dev branch marker is: 'X.Y.dev' or 'X.Y.devN' where N is an integer.
# 'X.Y.dev0' is the canonical version of 'X.Y.dev'
#
__version__ = "0.1.dev0"

from .types import Algorithm, InfeasibleError, RequestKey, TopologyKind
from .settings import (
    options,
    get_option,
    set_option,
    reset_option,
    describe_option,
    load_profile,
)
from .scenario import (
    BackhaulGraph,
    Cell,
    MobileUser,
    ServiceRequest,
    Scenario,
    ScenarioConfig,
    build_topology,
    generate_scenario,
    save_scenario,
    load_scenario,
)
from .costs import normalized_cost, SystemCost
from .jcora import (
    Assignment,
    SolutionReport,
    SolverTrace,
    FeasibilityReport,
    solve_jcora,
    validate,
    save_solution,
    load_solution,
)
from .baselines import solve_gojra, solve_hoda
from .harness import SweepSpec, SweepResult, run_sweep, emit_results, read_results
from .configuration import from_config


def solve(scenario: Scenario, algorithm: Union[str, Algorithm] = "gtda") -> Tuple[Assignment, SolutionReport]:
    """Solve a scenario with one of the offloading algorithms

    Parameters
    ----------
    scenario : Scenario
    algorithm : str or Algorithm, optional
        "gtda" (joint placement over the backhaul), "gojra" or "hoda"
        (home server only), by default "gtda"

    Returns
    -------
    Tuple[Assignment, SolutionReport]

    Examples
    --------
    >>> import mecsfc
    >>> s = mecsfc.generate_scenario(seed=1)
    >>> assignment, report = mecsfc.solve(s, "hoda")
    """
    algorithm = Algorithm.from_string(algorithm)
    if algorithm == Algorithm.GTDA:
        assignment, report, _ = solve_jcora(scenario)
        return assignment, report
    if algorithm == Algorithm.GOJRA:
        return solve_gojra(scenario)
    return solve_hoda(scenario)


__all__ = [
    "Algorithm",
    "InfeasibleError",
    "RequestKey",
    "TopologyKind",
    "options",
    "get_option",
    "set_option",
    "reset_option",
    "describe_option",
    "load_profile",
    "BackhaulGraph",
    "Cell",
    "MobileUser",
    "ServiceRequest",
    "Scenario",
    "ScenarioConfig",
    "build_topology",
    "generate_scenario",
    "save_scenario",
    "load_scenario",
    "normalized_cost",
    "SystemCost",
    "Assignment",
    "SolutionReport",
    "SolverTrace",
    "FeasibilityReport",
    "solve_jcora",
    "validate",
    "save_solution",
    "load_solution",
    "solve_gojra",
    "solve_hoda",
    "solve",
    "SweepSpec",
    "SweepResult",
    "run_sweep",
    "emit_results",
    "read_results",
    "from_config",
]
