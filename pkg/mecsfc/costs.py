"""Delay, energy, price and normalized cost of executing requests locally or remotely"""
from __future__ import annotations
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Dict, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from .radio import UplinkQuote, uplink_quote
from .scenario import BackhaulGraph, MobileUser, Scenario, ServiceRequest
from .settings import get_option, is_positive, register_option
from .types import InfeasibleError, RequestKey

if TYPE_CHECKING:
    from .jcora import Assignment

register_option(
    "costs.price.f_ref",
    1e9,
    "Reference clock (cycles/s) normalising the exponent of the computing price",
    validator=is_positive,
)

ArrayLike = Union[float, Sequence[float], np.ndarray]


@dataclass(frozen=True)
class LocalExecQuote:
    """Delay and energy of executing a request on the MU"""

    delay_s: float
    energy_j: float


def _positive_clocks(clocks: ArrayLike, work: np.ndarray) -> np.ndarray:
    """Clocks must be > 0 wherever there is work, >= 0 elsewhere"""
    f = np.broadcast_to(np.asarray(clocks, dtype=float), work.shape)
    if np.any(np.isnan(f) | (f < 0) | ((work > 0) & (f <= 0))):
        raise ValueError(f"Clock speeds must be > 0, got {f.tolist()}")
    return f


def _time(work: np.ndarray, f: np.ndarray) -> np.ndarray:
    return np.divide(work, f, out=np.zeros_like(work, dtype=float), where=work > 0)


def local_exec(mu: MobileUser, request: ServiceRequest, clocks: ArrayLike) -> LocalExecQuote:
    """Local execution of `request` with per-function clocks (cycles/s)

    delay = sum_l zeta xi_l c_l u / f_l,  energy = sum_l zeta xi_l u kappa f_l^2

    The energy term carries no cycles-per-bit factor.
    """
    bits = request.function_bits(mu.u_bits)
    f = _positive_clocks(clocks, bits)
    delay = float(np.sum(_time(bits * np.asarray(request.cycles_per_bit), f)))
    energy = float(np.sum(bits * mu.kappa * f**2))
    return LocalExecQuote(delay_s=delay, energy_j=energy)


def backhaul_delay(graph: BackhaulGraph, hosts: Sequence[int], home: int) -> np.ndarray:
    """Setup delay paid before each function of a chain

    The home server is the host in front of the first function. Consecutive
    hosts must be the same server (no delay) or directly connected.

    Raises
    ------
    InfeasibleError
        if two consecutive hosts are distinct and not connected
    """
    delays = np.zeros(len(hosts))
    prev = home
    for i, h in enumerate(hosts):
        if not graph.reachable_in_one_hop(prev, h):
            raise InfeasibleError(
                f"Function {i} hosted on server {h} is not connected to server {prev}",
                violation=1.0,
                server=h,
            )
        delays[i] = graph.delay(prev, h)
        prev = h
    return delays


def server_compute_delay(mu: MobileUser, request: ServiceRequest, clocks: ArrayLike) -> np.ndarray:
    """Execution time zeta xi u c / f of each function on its server, also the billed time"""
    cycles = request.cycles(mu.u_bits)
    return _time(cycles, _positive_clocks(clocks, cycles))


def compute_price(f: ArrayLike, eta: float = 1.0, vartheta: float = 2.5e-12) -> Union[float, np.ndarray]:
    """Computing price in $/s for clock speed f (cycles/s)

    P(f) = exp(-eta) (exp(f / f_ref) - 1) vartheta f_ref

    Examples
    --------
    >>> round(compute_price(1e9), 7)
    0.0015803
    >>> compute_price(0.0)
    0.0
    """
    f_ref = get_option("costs.price.f_ref")
    f_arr = np.asarray(f, dtype=float)
    if np.any(f_arr < 0):
        raise ValueError("Clock speed must be >= 0")
    price = np.exp(-eta) * np.expm1(f_arr / f_ref) * vartheta * f_ref
    return float(price) if price.ndim == 0 else price


def compute_cost(
    f: ArrayLike, cycles: ArrayLike, eta: float = 1.0, vartheta: float = 2.5e-12
) -> Union[float, np.ndarray]:
    """Cost in $ of executing `cycles` at clock speed f: P(f) * cycles / f"""
    f_arr = np.asarray(f, dtype=float)
    c_arr = np.asarray(cycles, dtype=float)
    if np.any(c_arr < 0):
        raise ValueError("Number of cycles must be >= 0")
    price = np.asarray(compute_price(f_arr, eta, vartheta))
    with np.errstate(divide="ignore", invalid="ignore"):
        cost = np.where(c_arr == 0, 0.0, price * c_arr / f_arr)
    if np.any(~np.isfinite(cost)):
        raise ValueError("Clock speed must be > 0 for a non-zero workload")
    return float(cost) if cost.ndim == 0 else cost


@dataclass(frozen=True)
class OffloadQuote:
    """Remote execution of a request

    total delay = uplink delay + sum over functions of (backhaul + compute delay)
    `hosts` is None for a placement-free estimate, then `backhaul_s` holds the
    per-function hop budget.
    """

    uplink: UplinkQuote
    backhaul_s: Tuple[float, ...]
    compute_s: Tuple[float, ...]
    clocks_hz: Tuple[float, ...]
    cost_usd: float
    hosts: Optional[Tuple[int, ...]] = None

    @property
    def delay_s(self) -> float:
        return self.uplink.delay_s + float(np.sum(self.backhaul_s) + np.sum(self.compute_s))

    @property
    def energy_j(self) -> float:
        """Energy spent by the MU: transmission only"""
        return self.uplink.energy_j


def offload_quote(
    scenario: Scenario,
    mu: MobileUser,
    request: ServiceRequest,
    hosts: Sequence[int],
    clocks: ArrayLike,
    uplink: Optional[UplinkQuote] = None,
) -> OffloadQuote:
    """Quote for executing `request` on `hosts` with remote clocks `clocks`"""
    uplink = uplink or uplink_quote(scenario, mu, request)
    cycles = request.cycles(mu.u_bits)
    f = _positive_clocks(clocks, cycles)
    if len(hosts) != len(request):
        raise ValueError(f"{len(hosts)} hosts given for a chain of {len(request)} functions")
    bh = backhaul_delay(scenario.graph, hosts, scenario.home_server(mu))
    cp = _time(cycles, f)
    cost = float(np.sum(compute_cost(f, cycles, scenario.eta, scenario.vartheta)))
    return OffloadQuote(
        uplink=uplink,
        backhaul_s=tuple(float(v) for v in bh),
        compute_s=tuple(float(v) for v in cp),
        clocks_hz=tuple(float(v) for v in f),
        cost_usd=cost,
        hosts=tuple(int(h) for h in hosts),
    )


def offload_term(scenario: Scenario, mu: MobileUser, quote: OffloadQuote) -> float:
    """Normalized cost of an offloaded request"""
    return (
        scenario.theta_tx * quote.energy_j / mu.energy_budget_j
        + scenario.theta_cp * quote.cost_usd / mu.compute_budget_usd
    )


def local_term(mu: MobileUser, quote: LocalExecQuote) -> float:
    """Normalized cost of a locally executed request"""
    return quote.energy_j / mu.energy_budget_j


def delta_z(scenario: Scenario, mu: MobileUser, local: LocalExecQuote, offload: OffloadQuote) -> float:
    """Cost improvement of offloading a request, positive iff offloading is cheaper"""
    return local_term(mu, local) - offload_term(scenario, mu, offload)


@dataclass
class CostBreakdown:
    """Normalized cost of one MU, split into its local and offloaded parts"""

    cell: int
    mu: int
    z_local: float
    z_offload: float
    terms: Dict[int, float] = field(default_factory=dict)
    energy_j: float = 0.0
    n_offloaded: int = 0

    @property
    def z(self) -> float:
        return self.z_local + self.z_offload


@dataclass
class SystemCost:
    """Per-MU breakdowns; `total` is the system objective"""

    breakdowns: Tuple[CostBreakdown, ...]

    @property
    def total(self) -> float:
        return float(sum(b.z for b in self.breakdowns))

    @property
    def mean_energy_j(self) -> float:
        if not self.breakdowns:
            return 0.0
        return float(np.mean([b.energy_j for b in self.breakdowns]))

    def to_dataframe(self) -> pd.DataFrame:
        """Table with one row per MU"""
        df = pd.DataFrame(
            [
                {
                    "cell": b.cell,
                    "mu": b.mu,
                    "z_local": b.z_local,
                    "z_offload": b.z_offload,
                    "z": b.z,
                    "energy_j": b.energy_j,
                    "n_offloaded": b.n_offloaded,
                }
                for b in self.breakdowns
            ],
            columns=["cell", "mu", "z_local", "z_offload", "z", "energy_j", "n_offloaded"],
        )
        return df.set_index(["cell", "mu"])


def normalized_cost(assignment: "Assignment", scenario: Scenario) -> SystemCost:
    """Normalized cost of every MU under `assignment`

    Z = sum_r [(1 - x) e_loc / E + x (theta_tx e_tx / E + theta_cp C / C_budget)]

    Raises
    ------
    ValueError
        if a request has no decision or lacks the clocks/placement it needs
    """
    out = []
    for mu in scenario.mus:
        b = CostBreakdown(cell=mu.cell, mu=mu.index, z_local=0.0, z_offload=0.0)
        for r in mu.requests:
            key = RequestKey(mu.cell, mu.index, r.id)
            if not assignment.is_complete_for(key):
                raise ValueError(f"Assignment has no complete decision for request {key}")
            if assignment.is_offloaded(key):
                q = offload_quote(
                    scenario, mu, r, assignment.hosts[key], assignment.remote_clocks[key]
                )
                term = offload_term(scenario, mu, q)
                b.z_offload += term
                b.energy_j += q.energy_j
                b.n_offloaded += 1
            else:
                lq = local_exec(mu, r, assignment.local_clocks[key])
                term = local_term(mu, lq)
                b.z_local += term
                b.energy_j += lq.energy_j
            b.terms[r.id] = term
        out.append(b)
    return SystemCost(breakdowns=tuple(out))


def energy_of(assignment: "Assignment", scenario: Scenario, mu: MobileUser) -> float:
    """Energy spent by `mu` in Joules: local execution plus uplink transmission"""
    total = 0.0
    for r in mu.requests:
        key = RequestKey(mu.cell, mu.index, r.id)
        if assignment.is_offloaded(key):
            total += uplink_quote(scenario, mu, r).energy_j
        else:
            total += local_exec(mu, r, assignment.local_clocks[key]).energy_j
    return total
