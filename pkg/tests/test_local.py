import numpy as np
import pytest
from scipy.optimize import minimize

from mecsfc.costs import local_exec
from mecsfc.jcora import local_allocation, split_local_offload
from mecsfc.scenario import ServiceRequest


def test_local_allocation_values(scenario):
    mu = scenario.mus[0]
    f = local_allocation(mu, mu.requests[0])
    # f_l proportional to c_l^(1/3)
    assert f[1] / f[0] == pytest.approx(2 ** (1 / 3))
    assert f.sum() == pytest.approx(1.0134e9, rel=1e-3)


def test_local_allocation_meets_deadline_with_equality(make_scenario):
    s = make_scenario(deadline_s=0.7, u_bits=0.6e6)
    mu = s.mus[0]
    q = local_exec(mu, mu.requests[0], local_allocation(mu, mu.requests[0]))
    assert q.delay_s == pytest.approx(0.7, rel=1e-12)


def test_local_allocation_is_energy_minimal(scenario):
    mu = scenario.mus[0]
    r = mu.requests[0]
    bits = r.function_bits(mu.u_bits)
    work = bits * np.asarray(r.cycles_per_bit)

    # clocks in GHz, energy in mJ
    res = minimize(
        lambda g: 1e3 * float(np.sum(bits * mu.kappa * (g * 1e9) ** 2)),
        x0=np.array([1.0, 1.0]),
        method="SLSQP",
        bounds=[(1e-3, None)] * 2,
        constraints=[{"type": "ineq", "fun": lambda g: mu.deadline_s - float(np.sum(work / (g * 1e9)))}],
        options={"ftol": 1e-14, "maxiter": 500},
    )
    assert res.success
    energy = local_exec(mu, r, local_allocation(mu, r)).energy_j
    assert energy == pytest.approx(res.fun / 1e3, rel=1e-6)


def test_local_allocation_scales_with_zeta(make_scenario):
    r = ServiceRequest(id=0, zeta=0.5, chain=(0, 1), xi=(1.0, 0.5), cycles_per_bit=(250.0, 500.0))
    s = make_scenario(requests=(r,))
    full = make_scenario()
    np.testing.assert_allclose(
        local_allocation(s.mus[0], r), 0.5 * local_allocation(full.mus[0], full.mus[0].requests[0])
    )


def test_split_local_offload(make_scenario):
    requests = tuple(
        ServiceRequest(id=i, zeta=0.3, chain=(0, 1), xi=(1.0, 0.5), cycles_per_bit=(250.0, 500.0))
        for i in range(3)
    )
    s = make_scenario(requests=requests, max_clock_hz=0.7e9)
    mu = s.mus[0]
    clocks = {r.id: local_allocation(mu, r) for r in mu.requests}
    # each request needs about 0.304 GHz, two fit
    assert split_local_offload(mu, clocks) == {0: False, 1: False, 2: True}


def test_split_local_offload_everything_fits(scenario):
    mu = scenario.mus[0]
    clocks = {r.id: local_allocation(mu, r) for r in mu.requests}
    assert split_local_offload(mu, clocks) == {0: False}


def test_split_local_offload_nothing_fits(make_scenario):
    s = make_scenario(max_clock_hz=0.5e9)
    mu = s.mus[0]
    clocks = {r.id: local_allocation(mu, r) for r in mu.requests}
    assert split_local_offload(mu, clocks) == {0: True}
