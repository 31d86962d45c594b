from __future__ import annotations
from dataclasses import dataclass, field
import logging
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from ..costs import backhaul_delay
from ..numerics import ConvexProgram, KKTResiduals, minimize_convex
from ..radio import UplinkQuote, uplink_quote
from ..scenario import Scenario
from ..settings import get_option
from ..types import InfeasibleError, RequestKey

logger = logging.getLogger(__name__)


@dataclass
class SlaveSolution:
    """Remote clocks of the placed requests and the quantities behind them

    `slack` holds, per function, the time budget y = backhaul delay + compute
    time; `delay_multipliers` are the multipliers of the per-request delay
    equalities.
    """

    clocks: Dict[RequestKey, Tuple[float, ...]] = field(default_factory=dict)
    slack: Dict[RequestKey, Tuple[float, ...]] = field(default_factory=dict)
    delay_multipliers: Dict[RequestKey, float] = field(default_factory=dict)
    objective: float = 0.0
    kkt: Optional[KKTResiduals] = None
    feasibility_search: bool = False


@dataclass
class _Layout:
    keys: List[RequestKey]
    offsets: List[int]
    cycles: np.ndarray
    delta: np.ndarray
    weight: np.ndarray
    budget: np.ndarray
    server_of: np.ndarray

    @property
    def n(self) -> int:
        return self.cycles.size


def _layout(
    scenario: Scenario,
    hosts: Mapping[RequestKey, Sequence[int]],
    uplinks: Optional[Mapping[RequestKey, UplinkQuote]],
) -> _Layout:
    keys = sorted(hosts)
    offsets, cycles, delta, weight, budget, server_of = [], [], [], [], [], []
    pos = 0
    for key in keys:
        mu = scenario.mu(key.cell, key.mu)
        r = mu.requests[key.request]
        up = uplinks[key] if uplinks and key in uplinks else uplink_quote(scenario, mu, r)
        offsets.append(pos)
        pos += len(r)
        cycles.extend(r.cycles(mu.u_bits))
        delta.extend(backhaul_delay(scenario.graph, hosts[key], scenario.home_server(mu)))
        weight.extend([mu.slave_weight] * len(r))
        server_of.extend(hosts[key])
        budget.append(mu.deadline_s - up.delay_s)
    offsets.append(pos)
    return _Layout(
        keys=keys,
        offsets=offsets,
        cycles=np.asarray(cycles, dtype=float),
        delta=np.asarray(delta, dtype=float),
        weight=np.asarray(weight, dtype=float),
        budget=np.asarray(budget, dtype=float),
        server_of=np.asarray(server_of, dtype=int),
    )


def _equalities(lay: _Layout, extra: int = 0) -> Tuple[np.ndarray, np.ndarray]:
    A = np.zeros((len(lay.keys), lay.n + extra))
    for i in range(len(lay.keys)):
        A[i, lay.offsets[i] : lay.offsets[i + 1]] = 1.0
    return A, lay.budget.copy()


def _load_constraint(
    lay: _Layout, idx: np.ndarray, capacity: float, n_vars: int, with_tau: bool
) -> Callable[[np.ndarray], Tuple[float, np.ndarray, np.ndarray]]:
    """Load ratio sum D / (F (y - delta)) - 1, or minus the extra variable tau"""
    D = lay.cycles[idx]
    delta = lay.delta[idx]

    def g(x: np.ndarray):
        s = x[idx] - delta
        load = float(np.sum(D / (capacity * s)))
        grad = np.zeros(n_vars)
        hess = np.zeros(n_vars)
        grad[idx] = -D / (capacity * s**2)
        hess[idx] = 2 * D / (capacity * s**3)
        if with_tau:
            grad[-1] = -1.0
            return load - x[-1], grad, hess
        return load - 1.0, grad, hess

    return g


def _server_groups(lay: _Layout) -> Dict[int, np.ndarray]:
    groups: Dict[int, List[int]] = {}
    for i, m in enumerate(lay.server_of):
        if lay.cycles[i] > 0:
            groups.setdefault(int(m), []).append(i)
    return {m: np.asarray(v) for m, v in sorted(groups.items())}


def _start_point(lay: _Layout) -> np.ndarray:
    """Equal clock for all functions of a request, using the whole delay budget"""
    y = np.empty(lay.n)
    for i in range(len(lay.keys)):
        sl = slice(lay.offsets[i], lay.offsets[i + 1])
        room = lay.budget[i] - float(np.sum(lay.delta[sl]))
        if not room > 0:
            raise InfeasibleError(
                f"Request {lay.keys[i]} has no delay budget left for computing ({room:.3g} s)",
                violation=-room,
            )
        D = lay.cycles[sl]
        share = D / D.sum() if D.sum() > 0 else np.full(D.size, 1.0 / D.size)
        y[sl] = lay.delta[sl] + room * share
    return y


def _feasible_start(
    scenario: Scenario, lay: _Layout, y0: np.ndarray, groups: Dict[int, np.ndarray]
) -> np.ndarray:
    """Point with every server load ratio below 1, from minimising the worst ratio"""
    cap = scenario.graph.capacity
    loads = {m: float(np.sum(lay.cycles[i] / (cap[m] * (y0[i] - lay.delta[i])))) for m, i in groups.items()}
    tau0 = 1.1 * max(loads.values()) + 1e-3
    A, b = _equalities(lay, extra=1)
    n = lay.n + 1
    prog = ConvexProgram(
        objective=lambda x: (x[-1], np.eye(1, n, n - 1).ravel(), np.zeros(n)),
        x0=np.append(y0, tau0),
        A=A,
        b=b,
        inequalities=[_load_constraint(lay, idx, cap[m], n, with_tau=True) for m, idx in groups.items()],
        lower=np.append(lay.delta, -np.inf),
    )
    sol = minimize_convex(prog)
    y = sol.x[:-1]
    loads = {m: float(np.sum(lay.cycles[i] / (cap[m] * (y[i] - lay.delta[i])))) for m, i in groups.items()}
    worst = max(loads, key=lambda m: (loads[m], -m))
    if loads[worst] >= 1.0:
        raise InfeasibleError(
            f"Placement exceeds the capacity of server {worst} "
            f"(minimum load ratio {loads[worst]:.4g})",
            violation=(loads[worst] - 1.0) * cap[worst],
            server=worst,
        )
    logger.debug("feasibility search reached worst load ratio %.4g", loads[worst])
    return y


def solve_slave(
    scenario: Scenario,
    hosts: Mapping[RequestKey, Sequence[int]],
    uplinks: Optional[Mapping[RequestKey, UplinkQuote]] = None,
) -> SlaveSolution:
    """Remote clocks minimising the computing price for a fixed placement

    With the per-function time budget y = delta + D / f as variable:

        minimize    sum beta a f_ref (y - delta) (exp(D / (f_ref (y - delta))) - 1)
        subject to  sum_l y_l = T - t_uplink                for every request
                    sum D / (F_m (y - delta)) <= 1           for every server m
                    y > delta

    with a = exp(-eta) vartheta. The start point spreads each request's budget
    in proportion to its cycles; if that overloads a server a feasibility
    search minimising the worst load ratio provides the start point.

    Parameters
    ----------
    scenario : Scenario
    hosts : Mapping[RequestKey, Sequence[int]]
        server of every function of the offloaded requests
    uplinks : Mapping[RequestKey, UplinkQuote], optional
        precomputed uplink quotes

    Returns
    -------
    SlaveSolution

    Raises
    ------
    InfeasibleError
        if a request has no delay budget left or the placement cannot meet a
        server's capacity; `server` names the overloaded server
    """
    if not hosts:
        return SlaveSolution()

    lay = _layout(scenario, hosts, uplinks)
    groups = _server_groups(lay)
    cap = scenario.graph.capacity
    f_ref = get_option("costs.price.f_ref")
    coef = lay.weight * np.exp(-scenario.eta) * scenario.vartheta * f_ref
    k = lay.cycles / f_ref

    def objective(y: np.ndarray):
        s = y - lay.delta
        with np.errstate(over="ignore", invalid="ignore"):
            r = k / s
            e = np.exp(r)
            val = float(np.sum(coef * s * np.expm1(r)))
            grad = coef * (np.expm1(r) - r * e)
            hess = coef * k**2 * e / s**3
        return val, grad, hess

    y0 = _start_point(lay)
    search = False
    for m, idx in groups.items():
        if np.sum(lay.cycles[idx] / (cap[m] * (y0[idx] - lay.delta[idx]))) >= 1.0:
            y0 = _feasible_start(scenario, lay, y0, groups)
            search = True
            break

    A, b = _equalities(lay)
    prog = ConvexProgram(
        objective=objective,
        x0=y0,
        A=A,
        b=b,
        inequalities=[_load_constraint(lay, idx, cap[m], lay.n, with_tau=False) for m, idx in groups.items()],
        lower=lay.delta,
    )
    sol = minimize_convex(prog)
    y = sol.x
    s = y - lay.delta
    f = np.divide(lay.cycles, s, out=np.zeros(lay.n), where=lay.cycles > 0)

    out = SlaveSolution(objective=sol.objective, kkt=sol.kkt, feasibility_search=search)
    for i, key in enumerate(lay.keys):
        sl = slice(lay.offsets[i], lay.offsets[i + 1])
        out.clocks[key] = tuple(float(v) for v in f[sl])
        out.slack[key] = tuple(float(v) for v in y[sl])
        out.delay_multipliers[key] = float(sol.eq_multipliers[i])
    logger.debug(
        "slave: %d requests, %d functions, objective %.6g, %d Newton steps",
        len(lay.keys), lay.n, sol.objective, sol.n_newton,
    )
    return out
