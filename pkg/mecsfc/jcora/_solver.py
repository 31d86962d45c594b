from __future__ import annotations
from dataclasses import dataclass, field
import logging
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Set, Tuple
import warnings

import numpy as np

from ..costs import delta_z, local_exec, normalized_cost
from ..numerics import KnapsackItem, solve_knapsack
from ..radio import UplinkQuote, uplink_quote
from ..scenario import Scenario
from ..settings import (
    get_option,
    is_between_0_and_1,
    is_positive_int,
    optional,
    register_option,
)
from ..types import InfeasibleError, RequestKey
from ._assignment import (
    Assignment,
    SolutionReport,
    SolverTrace,
    TraceRecord,
    offloaded_bits,
)
from ._local import local_allocation, split_local_offload
from ._master import (
    PlacementResult,
    RemoteEstimate,
    estimate_offload_quote,
    estimate_remote_alloc,
    place_functions_gtda,
)
from ._slave import SlaveSolution, solve_slave
from ._validate import validate

logger = logging.getLogger(__name__)

register_option(
    "solver.capacity_margin",
    1e-6,
    "Relative server capacity left free by placement",
    validator=is_between_0_and_1,
)
register_option(
    "solver.max_iterations",
    None,
    "Maximum number of migration attempts, None for the number of requests",
    validator=optional(is_positive_int),
)

Placer = Callable[[Scenario, Mapping[RequestKey, RemoteEstimate]], PlacementResult]
LocalClocks = Dict[RequestKey, np.ndarray]


@dataclass
class OffloadStep:
    """Outcome of estimating, placing and allocating a set of offloaded requests"""

    assignment: Assignment
    estimates: Dict[RequestKey, RemoteEstimate]
    placement: PlacementResult
    slave: SlaveSolution
    reverted: List[RequestKey] = field(default_factory=list)
    infeasible: List[RequestKey] = field(default_factory=list)


def uplink_quotes(scenario: Scenario) -> Dict[RequestKey, UplinkQuote]:
    """Uplink quote of every request that has a defined uplink"""
    out = {}
    for key, mu, r in scenario.requests():
        try:
            out[key] = uplink_quote(scenario, mu, r)
        except ValueError as err:
            logger.debug("no uplink for %s: %s", key, err)
    if scenario.n_requests and not out:
        warnings.warn("No request has a defined uplink; all requests execute locally")
    return out


def initial_split(scenario: Scenario) -> Tuple[LocalClocks, List[RequestKey]]:
    """Local clocks of every request and the requests that do not fit on their MU"""
    clocks: LocalClocks = {}
    offload: List[RequestKey] = []
    for mu in scenario.mus:
        per_mu = {r.id: local_allocation(mu, r) for r in mu.requests}
        for rid, x in split_local_offload(mu, per_mu).items():
            key = RequestKey(mu.cell, mu.index, rid)
            clocks[key] = per_mu[rid]
            if x:
                offload.append(key)
    return clocks, offload


def fit_local_capacity(scenario: Scenario, assignment: Assignment, clocks: LocalClocks) -> List[RequestKey]:
    """Give every local request its deadline-meeting clocks

    Where the local requests of an MU exceed its maximum clock, the largest
    packable subset is kept and the requests outside it are returned; they
    still run at their deadline-meeting clocks, so the MU clock limit is
    violated instead of a deadline and the energy is not understated.
    """
    over: List[RequestKey] = []
    for mu in scenario.mus:
        keys = [RequestKey(mu.cell, mu.index, r.id) for r in mu.requests]
        local = [k for k in keys if not assignment.offload.get(k, False)]
        for k in local:
            assignment.set_local(k, clocks[k])
        demand = {k: float(np.sum(clocks[k])) for k in local}
        if sum(demand.values()) <= mu.max_clock_hz:
            continue
        keep = solve_knapsack([KnapsackItem(k, 1.0, demand[k]) for k in local], mu.max_clock_hz)
        over.extend(k for k in local if k not in keep)
    return sorted(over)


def _offload_once(
    scenario: Scenario,
    offload: Iterable[RequestKey],
    clocks: LocalClocks,
    place: Placer,
    uplinks: Mapping[RequestKey, UplinkQuote],
    hop_budget_s: Optional[float],
    protected: Set[RequestKey],
) -> OffloadStep:
    estimates: Dict[RequestKey, RemoteEstimate] = {}
    reverted: List[RequestKey] = []
    for key in sorted(set(offload)):
        if key not in uplinks:
            reverted.append(key)
            continue
        mu = scenario.mu(key.cell, key.mu)
        try:
            estimates[key] = estimate_remote_alloc(
                scenario, mu, mu.requests[key.request], uplinks[key], hop_budget_s
            )
        except InfeasibleError:
            reverted.append(key)

    placement = place(scenario, estimates)
    hosts = dict(placement.hosts)
    reverted.extend(placement.unplaced)

    while True:
        try:
            slave = solve_slave(scenario, hosts, uplinks)
            break
        except InfeasibleError as err:
            involved = [k for k in hosts if err.server is None or err.server in hosts[k]] or list(hosts)
            victim = max(involved, key=lambda k: (k not in protected, estimates[k].demand_hz, k))
            logger.debug("reverting %s: %s", victim, err)
            hosts.pop(victim)
            reverted.append(victim)

    assignment = Assignment()
    for key in sorted(clocks):
        if key in hosts:
            assignment.set_offloaded(key, hosts[key], slave.clocks[key])
        else:
            assignment.offload[key] = False
    infeasible = fit_local_capacity(scenario, assignment, clocks)
    return OffloadStep(
        assignment=assignment,
        estimates=estimates,
        placement=placement,
        slave=slave,
        reverted=sorted(reverted),
        infeasible=infeasible,
    )


def _replacements(
    scenario: Scenario,
    step: OffloadStep,
    clocks: LocalClocks,
    uplinks: Mapping[RequestKey, UplinkQuote],
    hop_budget_s: Optional[float],
    banned: Set[RequestKey],
) -> List[RequestKey]:
    """Local requests to offload instead, on every MU over its clock limit

    Per MU a knapsack keeps as many offloadable requests local as fit next
    to the requests that have to stay; among equally many, the requests
    with the smaller remote demand are the ones offloaded.
    """
    out: List[RequestKey] = []
    for cell, index in sorted({(k.cell, k.mu) for k in step.infeasible}):
        mu = scenario.mu(cell, index)
        local = [
            RequestKey(cell, index, r.id)
            for r in mu.requests
            if not step.assignment.offload.get(RequestKey(cell, index, r.id), False)
        ]
        remote: Dict[RequestKey, float] = {}
        for k in local:
            if k in banned or k not in uplinks:
                continue
            try:
                est = estimate_remote_alloc(scenario, mu, mu.requests[k.request], uplinks[k], hop_budget_s)
            except InfeasibleError:
                continue
            remote[k] = est.demand_hz
        fixed = sum(float(np.sum(clocks[k])) for k in local if k not in remote)
        room = mu.max_clock_hz - fixed
        if not remote or room < 0:
            continue
        norm = 1.0 + sum(remote.values())
        items = [KnapsackItem(k, 1.0 + remote[k] / norm, float(np.sum(clocks[k]))) for k in remote]
        keep = solve_knapsack(items, room)
        out.extend(k for k in remote if k not in keep)
    return sorted(out)


def run_offload_step(
    scenario: Scenario,
    offload: Iterable[RequestKey],
    clocks: LocalClocks,
    place: Placer,
    uplinks: Mapping[RequestKey, UplinkQuote],
    hop_budget_s: Optional[float] = None,
    protected: Iterable[RequestKey] = (),
) -> OffloadStep:
    """Estimate, place and allocate the requests in `offload`; the rest run locally

    Requests without delay budget or without a feasible placement revert to
    local execution. While the allocation finds a server overloaded, the
    request with the largest estimated demand on that server reverts,
    requests in `protected` last.

    When a reverted request leaves its MU over the clock limit, the MU
    offloads other local requests in its place (see `_replacements`) and
    the step is repeated with the reverted requests left local. This stops
    once every MU fits or no MU has a request left to offload.
    """
    wanted = set(offload)
    protected = set(protected)
    banned: Set[RequestKey] = set()
    step = _offload_once(scenario, wanted, clocks, place, uplinks, hop_budget_s, protected)
    for _ in range(2 * scenario.n_requests):
        if not step.infeasible:
            break
        banned |= set(step.reverted)
        extra = _replacements(scenario, step, clocks, uplinks, hop_budget_s, banned)
        if not extra:
            break
        logger.debug("offloading %s in place of %s", extra, sorted(set(step.reverted)))
        wanted = (wanted - banned) | set(extra)
        protected |= set(extra)
        step = _offload_once(scenario, wanted, clocks, place, uplinks, hop_budget_s, protected)
    step.reverted = sorted(set(step.reverted) | banned)
    return step


def build_report(
    algorithm: str,
    scenario: Scenario,
    assignment: Assignment,
    infeasible: List[RequestKey],
    iterations: int = 0,
) -> SolutionReport:
    cost = normalized_cost(assignment, scenario)
    report = SolutionReport(
        algorithm=algorithm,
        objective=cost.total,
        cost=cost,
        feasibility=validate(assignment, scenario),
        infeasible_requests=list(infeasible),
        n_offloaded=len(assignment.offloaded_keys),
        offloaded_bits=offloaded_bits(assignment, scenario),
        iterations=iterations,
    )
    logger.info("%r", report)
    return report


def warn_about(step: OffloadStep, wanted: Iterable[RequestKey]) -> None:
    """Warn about requests that had to be offloaded but could not be"""
    reverted = sorted(set(step.reverted) & set(wanted))
    if reverted:
        warnings.warn(
            f"{len(reverted)} request(s) could not be offloaded and execute locally: "
            + ", ".join(str(k) for k in reverted)
        )
    if step.infeasible:
        warnings.warn(
            f"{len(step.infeasible)} request(s) exceed their MU clock limit: "
            + ", ".join(str(k) for k in step.infeasible)
        )


def solve_jcora(scenario: Scenario) -> Tuple[Assignment, SolutionReport, SolverTrace]:
    """Joint offloading, function placement and clock allocation

    1. Every request gets its energy-minimal local clocks; per MU a knapsack
       keeps as many requests local as its clock allows, the rest are offloaded.
    2. Offloaded requests get placement-free clock estimates, are placed by
       the greedy topology decomposition and get their clocks from the
       convex price minimisation.
    3. The local request with the largest positive cost improvement is
       tentatively offloaded and step 2 re-run; the migration is kept if the
       objective does not increase, otherwise the request stays local for
       good. This repeats until no candidate is left.

    Returns
    -------
    Tuple[Assignment, SolutionReport, SolverTrace]

    Raises
    ------
    RuntimeError
        if the objective increased between accepted migrations

    Examples
    --------
    >>> s = mecsfc.generate_scenario(seed=1)
    >>> assignment, report, trace = solve_jcora(s)
    >>> trace.is_non_increasing()
    True
    """
    trace = SolverTrace()
    uplinks = uplink_quotes(scenario)
    clocks, forced = initial_split(scenario)

    current = run_offload_step(scenario, forced, clocks, place_functions_gtda, uplinks, protected=forced)
    warn_about(current, forced)
    objective = normalized_cost(current.assignment, scenario).total
    trace.objectives.append(objective)
    logger.info("initial offloading: %d offloaded, objective %.6g", len(current.assignment.offloaded_keys), objective)

    gains: Dict[RequestKey, float] = {}
    for key, mu, r in scenario.requests():
        if key not in uplinks:
            continue
        try:
            quote, est = estimate_offload_quote(scenario, mu, r, uplinks[key])
        except InfeasibleError:
            continue
        trace.price_multipliers[key] = est.multiplier
        gains[key] = delta_z(scenario, mu, local_exec(mu, r, clocks[key]), quote)

    max_iter = get_option("solver.max_iterations") or scenario.n_requests
    rejected: Set[RequestKey] = set()
    iterations = 0
    for it in range(1, max_iter + 1):
        candidates = [
            (g, k)
            for k, g in gains.items()
            if g > 0 and k not in rejected and not current.assignment.offload.get(k, False)
        ]
        if not candidates:
            break
        gain, key = min(candidates, key=lambda c: (-c[0], c[1]))
        iterations = it

        trial = run_offload_step(
            scenario,
            set(current.assignment.offloaded_keys) | {key},
            clocks,
            place_functions_gtda,
            uplinks,
            protected=current.assignment.offloaded_keys,
        )
        trial_objective = normalized_cost(trial.assignment, scenario).total
        accepted = (
            trial.assignment.offload.get(key, False)
            and trial_objective <= objective
            and set(trial.infeasible) <= set(current.infeasible)
        )
        logger.debug(
            "migration %d: %s gain %.4g -> objective %.6g (%s)",
            it, key, gain, trial_objective, "accepted" if accepted else "rejected",
        )
        trace.records.append(TraceRecord(it, key, gain, trial_objective, bool(accepted)))
        if accepted:
            current = trial
            objective = trial_objective
            trace.objectives.append(objective)
        else:
            rejected.add(key)

    if not trace.is_non_increasing():
        raise RuntimeError(f"Objective increased during migration: {trace.objectives}")

    trace.delay_multipliers = dict(current.slave.delay_multipliers)
    trace.slack = dict(current.slave.slack)
    trace.free_capacity = dict(current.placement.free_capacity)
    trace.ranking = dict(current.placement.ranking)
    trace.unplaced = list(current.placement.unplaced)
    trace.notes.extend(f"reverted to local: {k}" for k in current.reverted)
    trace.notes.extend(f"MU clock exceeded: {k}" for k in current.infeasible)

    report = build_report("gtda", scenario, current.assignment, current.infeasible, iterations)
    return current.assignment, report, trace
