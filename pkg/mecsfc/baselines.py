"""Baseline algorithms that only offload to the base station's own server

* GOJRA fills every base-station server with the largest requests first
* HODA offloads a request when doing so lowers its normalized cost
"""
from __future__ import annotations
import logging
from typing import Dict, Mapping, Optional, Tuple

from .costs import delta_z, local_exec
from .jcora import Assignment, PlacementResult, RemoteEstimate, SolutionReport
from .jcora._master import estimate_offload_quote
from .jcora._solver import build_report, initial_split, run_offload_step, uplink_quotes, warn_about
from .scenario import Scenario
from .settings import get_option
from .types import InfeasibleError, RequestKey

logger = logging.getLogger(__name__)


def place_home_only(
    scenario: Scenario,
    estimates: Mapping[RequestKey, RemoteEstimate],
    priority: Mapping[RequestKey, float],
    margin: Optional[float] = None,
) -> PlacementResult:
    """Whole requests on their home server, in decreasing priority while they fit

    A request fits if its home server supports every function of its chain
    and has the estimated clock sum left.
    """
    margin = get_option("solver.capacity_margin") if margin is None else margin
    graph = scenario.graph
    free = {m: graph.capacity[m] * (1.0 - margin) for m in graph.nodes}
    result = PlacementResult()
    for key in sorted(estimates, key=lambda k: (-priority.get(k, 0.0), k)):
        mu = scenario.mu(key.cell, key.mu)
        home = scenario.home_server(mu)
        chain = mu.requests[key.request].chain
        demand = estimates[key].demand_hz
        if all(graph.supports(home, fn) for fn in chain) and demand <= free[home]:
            free[home] -= demand
            result.hosts[key] = (home,) * len(chain)
        else:
            result.unplaced.append(key)
    result.free_capacity = free
    return result


def solve_gojra(scenario: Scenario) -> Tuple[Assignment, SolutionReport]:
    """Greedy offloading to home servers, largest input first, then joint clock allocation

    Every request whose delay budget allows offloading is a candidate; the
    candidates are packed onto their base-station server until the estimated
    clocks no longer fit, requests that do not fit on their MU first and then
    in decreasing order of input data. The others run locally with their
    energy-minimal clocks.
    """
    uplinks = uplink_quotes(scenario)
    clocks, forced = initial_split(scenario)
    size: Dict[RequestKey, float] = {}
    for key, mu, r in scenario.requests():
        size[key] = float("inf") if key in forced else r.data_bits(mu.u_bits)

    def place(s: Scenario, estimates: Mapping[RequestKey, RemoteEstimate]) -> PlacementResult:
        return place_home_only(s, estimates, size)

    step = run_offload_step(scenario, list(uplinks), clocks, place, uplinks, hop_budget_s=0.0, protected=forced)
    warn_about(step, forced)
    logger.info("GOJRA offloaded %d requests", len(step.assignment.offloaded_keys))
    report = build_report("gojra", scenario, step.assignment, step.infeasible)
    return step.assignment, report


def solve_hoda(scenario: Scenario) -> Tuple[Assignment, SolutionReport]:
    """Per-base-station offloading of requests with a positive cost improvement

    Starts from the same local/offload split as GTDA; requests that do not
    fit on their MU are offloaded first, then every request whose
    home-server cost improvement is positive, largest improvement first,
    while its home server has capacity. There is no cooperation between
    servers.
    """
    uplinks = uplink_quotes(scenario)
    clocks, forced = initial_split(scenario)
    priority: Dict[RequestKey, float] = {k: float("inf") for k in forced}
    for key, mu, r in scenario.requests():
        if key in priority or key not in uplinks:
            continue
        try:
            quote, _ = estimate_offload_quote(scenario, mu, r, uplinks[key], hop_budget_s=0.0)
        except InfeasibleError:
            continue
        gain = delta_z(scenario, mu, local_exec(mu, r, clocks[key]), quote)
        if gain > 0:
            priority[key] = gain

    def place(s: Scenario, estimates: Mapping[RequestKey, RemoteEstimate]) -> PlacementResult:
        return place_home_only(s, estimates, priority)

    step = run_offload_step(scenario, list(priority), clocks, place, uplinks, hop_budget_s=0.0, protected=forced)
    warn_about(step, forced)
    logger.info("HODA offloaded %d requests", len(step.assignment.offloaded_keys))
    report = build_report("hoda", scenario, step.assignment, step.infeasible)
    return step.assignment, report
