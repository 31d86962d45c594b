from __future__ import annotations
from typing import Dict, Mapping, Sequence

import numpy as np

from ..numerics import KnapsackItem, solve_knapsack
from ..scenario import MobileUser, ServiceRequest


def local_allocation(mu: MobileUser, request: ServiceRequest) -> np.ndarray:
    """Energy-minimal local clocks that meet the deadline with equality

    f_l = c_l^(1/3) zeta u (sum_j xi_j c_j^(2/3)) / T

    The energy sum_l zeta xi_l u kappa f_l^2 under the delay constraint
    sum_l zeta xi_l c_l u / f_l <= T is stationary for f_l proportional to
    c_l^(1/3); the constraint is tight at the optimum.

    Returns
    -------
    np.ndarray
        clock per function in cycles/s

    Examples
    --------
    >>> # zeta=1, xi=(1, 1), c=(250, 500), u=0.8e6, T=0.8
    >>> np.round(local_allocation(mu, request) / 1e9, 3)
    array([0.647, 0.815])
    """
    if len(request.chain) == 0:
        raise ValueError(f"Request {request.id} has an empty chain")
    c = np.asarray(request.cycles_per_bit, dtype=float)
    xi = np.asarray(request.xi, dtype=float)
    weight = float(np.sum(xi * np.cbrt(c) ** 2))
    return np.cbrt(c) * request.data_bits(mu.u_bits) * weight / mu.deadline_s


def split_local_offload(
    mu: MobileUser, clocks: Mapping[int, Sequence[float]]
) -> Dict[int, bool]:
    """Offloading flags that keep as many requests local as the MU clock allows

    A knapsack with unit value per request, item size the request's total
    local clock and capacity the MU's maximum clock; among equally many
    requests the smaller total clock demand is preferred.

    Parameters
    ----------
    mu : MobileUser
    clocks : Mapping[int, Sequence[float]]
        local clocks per request id, from `local_allocation`

    Returns
    -------
    Dict[int, bool]
        True for requests to offload
    """
    items = [KnapsackItem(id=r.id, value=1.0, size=float(np.sum(clocks[r.id]))) for r in mu.requests]
    keep = solve_knapsack(items, mu.max_clock_hz)
    return {r.id: r.id not in keep for r in mu.requests}
