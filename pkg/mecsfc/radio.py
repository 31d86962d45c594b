"""Uplink model: signal-to-interference ratio, rate, transmission delay and energy

Massive-MIMO cells are interference limited: thermal noise is neglected and
the MU with the same index in every other cell is the co-channel interferer.
"""
from __future__ import annotations
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .scenario import MobileUser, Scenario, ServiceRequest
from .settings import get_option, is_positive, optional, register_option

register_option(
    "radio.sir_cap",
    None,
    "Upper limit on the SIR; when set, a single-cell scenario gets this SIR instead of an error",
    validator=optional(is_positive),
)


@dataclass(frozen=True)
class UplinkQuote:
    """Transmission of one request's input data to the base station"""

    sir: float
    rate_bps: float
    delay_s: float
    energy_j: float

    @staticmethod
    def from_rate(rate_bps: float, bits: float, tx_power_w: float, sir: float = np.nan) -> "UplinkQuote":
        """Quote for sending `bits` at a given rate

        Examples
        --------
        >>> q = UplinkQuote.from_rate(1e6, 0.16e6, 0.1)
        >>> round(q.delay_s, 12), round(q.energy_j, 12)
        (0.16, 0.016)
        """
        if not rate_bps > 0:
            raise ValueError(f"Uplink rate must be > 0, got {rate_bps}")
        if bits < 0:
            raise ValueError(f"Number of bits must be >= 0, got {bits}")
        delay = bits / rate_bps
        return UplinkQuote(sir=sir, rate_bps=rate_bps, delay_s=delay, energy_j=tx_power_w * delay)


def _distance(a, b) -> float:
    return float(np.hypot(a[0] - b[0], a[1] - b[1]))


def compute_sir(scenario: Scenario, mu: MobileUser) -> float:
    """SIR of `mu` at its base station

    SIR = 1 / sum_q (r_s / r_q)^(2 gamma), where r_s is the distance of the
    MU to its own base station, r_q the distance of the co-channel MU in
    cell q to the same base station and gamma the path-loss exponent.

    Raises
    ------
    ValueError
        if there is no other cell (and option `radio.sir_cap` is unset) or a
        co-channel MU is missing

    Examples
    --------
    >>> s = mecsfc.generate_scenario(seed=1)
    >>> compute_sir(s, s.mus[0]) > 0
    True
    """
    bs = scenario.cells[mu.cell].position
    r_s = _distance(mu.position, bs)
    ratios = []
    for q in range(len(scenario.cells)):
        if q == mu.cell:
            continue
        try:
            peer = scenario.mu(q, mu.index)
        except KeyError as e:
            raise ValueError(f"MU {mu.cell}/{mu.index} has no co-channel MU in cell {q}") from e
        ratios.append(r_s / _distance(peer.position, bs))

    cap = get_option("radio.sir_cap")
    if not ratios:
        if cap is None:
            raise ValueError("no interference term; SIR undefined (configure >= 2 cells or radio.sir_cap)")
        return float(cap)

    sir = 1.0 / float(np.sum(np.asarray(ratios) ** (2 * scenario.pathloss_exponent)))
    return sir if cap is None else min(sir, float(cap))


def uplink_rate(scenario: Scenario, mu: MobileUser) -> float:
    """Achievable uplink rate W log2(1 + SIR) in bit/s"""
    return scenario.cells[mu.cell].bandwidth_hz * float(np.log2(1.0 + compute_sir(scenario, mu)))


def uplink_quote(
    scenario: Scenario,
    mu: MobileUser,
    request: ServiceRequest,
    *,
    rate_bps: Optional[float] = None,
) -> UplinkQuote:
    """Uplink delay and transmit energy of offloading `request`

    Parameters
    ----------
    scenario : Scenario
    mu : MobileUser
        owner of the request
    request : ServiceRequest
    rate_bps : float, optional
        use this rate instead of the SIR-derived one

    Returns
    -------
    UplinkQuote
    """
    if rate_bps is None:
        sir = compute_sir(scenario, mu)
        rate_bps = scenario.cells[mu.cell].bandwidth_hz * float(np.log2(1.0 + sir))
    else:
        sir = np.nan
    return UplinkQuote.from_rate(rate_bps, request.data_bits(mu.u_bits), mu.tx_power_w, sir=sir)
