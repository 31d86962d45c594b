from __future__ import annotations
from dataclasses import dataclass, field
import logging
from typing import Dict, List, Mapping, Optional, Tuple

import numpy as np

from ..costs import OffloadQuote, compute_cost
from ..numerics import KnapsackItem, find_root, lambert_w0, solve_knapsack
from ..radio import UplinkQuote, uplink_quote
from ..scenario import MobileUser, Scenario, ServiceRequest
from ..settings import get_option
from ..types import InfeasibleError, RequestKey

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RemoteEstimate:
    """Placement-free estimate of the remote clocks of one request

    `multiplier` is the multiplier of the request's delay constraint in the
    price-minimisation that yields the clocks.
    """

    clocks_hz: Tuple[float, ...]
    multiplier: float
    slack_s: float
    hop_budget_s: float

    @property
    def demand_hz(self) -> float:
        return float(sum(self.clocks_hz))


def hop_budget(scenario: Scenario, request: ServiceRequest) -> float:
    """Worst-case backhaul delay of a chain: one hop before every function"""
    return scenario.graph.max_delay * len(request)


def _price_equation(g: float) -> float:
    # value of C e^-eta vartheta mu giving the normalised clock g
    return (g - 1.0) * np.exp(g) + 1.0


def estimate_remote_alloc(
    scenario: Scenario,
    mu: MobileUser,
    request: ServiceRequest,
    uplink: UplinkQuote,
    hop_budget_s: Optional[float] = None,
) -> RemoteEstimate:
    """Remote clocks minimising the computing cost under the delay budget

    Every function gets the clock f = f_ref (W0((K - 1) / e) + 1) with
    K = C e^-eta vartheta mu; the multiplier mu is the root of the delay
    equation sum_l D_l / f = T - t_uplink - hop_budget.
    Single-function requests use f = D / slack directly.

    Raises
    ------
    InfeasibleError
        if the delay budget left after uplink and backhaul is not positive
    """
    hop = hop_budget(scenario, request) if hop_budget_s is None else hop_budget_s
    slack = mu.deadline_s - uplink.delay_s - hop
    if not slack > 0:
        raise InfeasibleError(
            f"Request infeasible for offloading: delay budget {slack:.3g} s after uplink and backhaul",
            violation=-slack,
        )

    f_ref = get_option("costs.price.f_ref")
    scale = mu.compute_budget_usd * np.exp(-scenario.eta) * scenario.vartheta
    cycles = request.cycles(mu.u_bits)
    total = float(np.sum(cycles))
    n = len(request)

    if total == 0:
        return RemoteEstimate((0.0,) * n, 0.0, slack, hop)

    g0 = total / (f_ref * slack)
    if n == 1:
        return RemoteEstimate((total / slack,), _price_equation(g0) / scale, slack, hop)

    def clock(K: float) -> float:
        return float(lambert_w0((K - 1.0) / np.e)) + 1.0

    def residual(K: float) -> float:
        return total / (f_ref * clock(K)) - slack

    lo, hi = _price_equation(0.5 * g0), _price_equation(2.0 * g0)
    K = find_root(residual, lo, hi, tol=get_option("numerics.root.tol") * hi)
    g = clock(K)
    return RemoteEstimate((g * f_ref,) * n, K / scale, slack, hop)


def estimate_offload_quote(
    scenario: Scenario,
    mu: MobileUser,
    request: ServiceRequest,
    uplink: Optional[UplinkQuote] = None,
    hop_budget_s: Optional[float] = None,
) -> Tuple[OffloadQuote, RemoteEstimate]:
    """Offload quote from the remote estimate, without a placement"""
    uplink = uplink or uplink_quote(scenario, mu, request)
    est = estimate_remote_alloc(scenario, mu, request, uplink, hop_budget_s)
    cycles = request.cycles(mu.u_bits)
    f = np.asarray(est.clocks_hz)
    n = len(request)
    compute_s = np.divide(cycles, f, out=np.zeros(n), where=cycles > 0)
    quote = OffloadQuote(
        uplink=uplink,
        backhaul_s=(est.hop_budget_s / n,) * n,
        compute_s=tuple(float(v) for v in compute_s),
        clocks_hz=est.clocks_hz,
        cost_usd=float(np.sum(compute_cost(f, cycles, scenario.eta, scenario.vartheta))),
    )
    return quote, est


@dataclass
class PlacementResult:
    """Hosts of every placed request and the state of the greedy passes"""

    hosts: Dict[RequestKey, Tuple[int, ...]] = field(default_factory=dict)
    unplaced: List[RequestKey] = field(default_factory=list)
    free_capacity: Dict[int, float] = field(default_factory=dict)
    ranking: Dict[int, float] = field(default_factory=dict)


def place_functions_gtda(
    scenario: Scenario,
    estimates: Mapping[RequestKey, RemoteEstimate],
    margin: Optional[float] = None,
) -> PlacementResult:
    """Greedy topology decomposition placement

    Phase 1 fills every base-station server with functions of its own cell's
    requests (knapsack, unit value per function, size its estimated clock).
    Phase 2 visits the servers by decreasing free capacity per in-neighbour
    and packs the remaining functions onto each, accepting a function only
    if the server is the same as or connected to the hosts already chosen
    for its chain neighbours (the home server stands in front of the first
    function). Requests with a function left unplaced are returned in
    `unplaced`, their other functions are released.

    Parameters
    ----------
    scenario : Scenario
    estimates : Mapping[RequestKey, RemoteEstimate]
        estimated clocks of the requests to place
    margin : float, optional
        relative capacity kept free, by default option `solver.capacity_margin`

    Returns
    -------
    PlacementResult
    """
    margin = get_option("solver.capacity_margin") if margin is None else margin
    graph = scenario.graph
    free = {m: graph.capacity[m] * (1.0 - margin) for m in graph.nodes}
    placed: Dict[RequestKey, List[Optional[int]]] = {}
    home: Dict[RequestKey, int] = {}
    chains: Dict[RequestKey, Tuple[int, ...]] = {}
    for key in sorted(estimates):
        mu = scenario.mu(key.cell, key.mu)
        home[key] = scenario.home_server(mu)
        chains[key] = mu.requests[key.request].chain
        placed[key] = [None] * len(chains[key])

    def place(m: int, candidates: List[Tuple[RequestKey, int]]) -> None:
        items = [
            KnapsackItem(id=(key, l), value=1.0, size=estimates[key].clocks_hz[l])
            for key, l in candidates
        ]
        for key, l in solve_knapsack(items, max(free[m], 0.0)):
            placed[key][l] = m
            free[m] -= estimates[key].clocks_hz[l]

    for m in sorted(graph.edge_servers):
        candidates = [
            (key, l)
            for key in placed
            if home[key] == m
            for l, fn in enumerate(chains[key])
            if graph.supports(m, fn)
        ]
        place(m, candidates)

    ranking = {m: free[m] / max(1, len(graph.in_neighbors(m))) for m in graph.nodes}
    order = sorted(graph.nodes, key=lambda m: (-ranking[m], m))
    logger.debug("server ranking: %s", order)

    for m in order:
        candidates = []
        for key, hosts in placed.items():
            for l, h in enumerate(hosts):
                if h is not None or not graph.supports(m, chains[key][l]):
                    continue
                prev = home[key] if l == 0 else hosts[l - 1]
                if prev is not None and not graph.reachable_in_one_hop(prev, m):
                    continue
                nxt = hosts[l + 1] if l + 1 < len(hosts) else None
                if nxt is not None and not graph.reachable_in_one_hop(m, nxt):
                    continue
                candidates.append((key, l))
        if candidates:
            place(m, candidates)

    result = PlacementResult(ranking=ranking)
    for key, hosts in placed.items():
        if any(h is None for h in hosts):
            for l, h in enumerate(hosts):
                if h is not None:
                    free[h] += estimates[key].clocks_hz[l]
            result.unplaced.append(key)
        else:
            result.hosts[key] = tuple(int(h) for h in hosts)  # type: ignore[arg-type]
    result.free_capacity = free
    if result.unplaced:
        logger.debug("%d requests could not be placed", len(result.unplaced))
    return result
