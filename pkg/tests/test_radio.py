import dataclasses

import numpy as np
import pytest

import mecsfc
from mecsfc.radio import UplinkQuote, compute_sir, uplink_quote, uplink_rate
from mecsfc.scenario import Scenario

# MU 100 m from its base station, co-channel MU 1500 m away, path-loss exponent 3.8
SIR = 15.0 ** 7.6
RATE = 1e6 * np.log2(1.0 + SIR)


def test_sir(scenario):
    for mu in scenario.mus:
        assert compute_sir(scenario, mu) == pytest.approx(SIR, rel=1e-9)


def test_rate(scenario):
    mu = scenario.mus[0]
    assert uplink_rate(scenario, mu) == pytest.approx(RATE, rel=1e-9)


def test_uplink_quote(scenario):
    mu = scenario.mus[0]
    q = uplink_quote(scenario, mu, mu.requests[0])
    assert q.rate_bps == pytest.approx(RATE, rel=1e-9)
    assert q.delay_s == pytest.approx(1e6 / RATE, rel=1e-9)
    assert q.energy_j == pytest.approx(0.1 * 1e6 / RATE, rel=1e-9)


def test_uplink_quote_with_given_rate(scenario):
    mu = scenario.mus[0]
    q = uplink_quote(scenario, mu, mu.requests[0], rate_bps=2e6)
    assert q.delay_s == 0.5
    assert q.energy_j == pytest.approx(0.05)
    assert np.isnan(q.sir)


def test_from_rate():
    q = UplinkQuote.from_rate(1e6, 0.16e6, 0.1)
    assert q.delay_s == pytest.approx(0.16)
    assert q.energy_j == pytest.approx(0.016)
    with pytest.raises(ValueError, match="rate"):
        UplinkQuote.from_rate(0.0, 1e3, 0.1)


def test_sir_grows_with_pathloss_exponent(scenario):
    steep = Scenario(graph=scenario.graph, cells=scenario.cells, mus=scenario.mus, pathloss_exponent=4.0)
    mu = scenario.mus[0]
    assert compute_sir(steep, mu) > compute_sir(scenario, mu)


def test_single_cell_sir_undefined(scenario):
    single = Scenario(graph=scenario.graph, cells=scenario.cells[:1], mus=scenario.mus[:1])
    with pytest.raises(ValueError, match="SIR undefined"):
        compute_sir(single, single.mus[0])


def test_single_cell_with_sir_cap(scenario):
    single = Scenario(graph=scenario.graph, cells=scenario.cells[:1], mus=scenario.mus[:1])
    mecsfc.set_option("radio.sir_cap", 1000.0)
    assert compute_sir(single, single.mus[0]) == 1000.0
    # the cap also limits multi-cell SIR
    assert compute_sir(scenario, scenario.mus[0]) == 1000.0


def test_generated_scenario_rates_positive():
    s = mecsfc.generate_scenario(seed=1)
    rates = [uplink_rate(s, mu) for mu in s.mus]
    assert min(rates) > 0


@pytest.mark.parametrize("factor", [0.25, 3.7])
def test_sir_is_scale_invariant(factor):
    s = mecsfc.generate_scenario(seed=2)

    def scaled(p):
        return (p[0] * factor, p[1] * factor)

    big = Scenario(
        graph=s.graph,
        cells=tuple(dataclasses.replace(c, position=scaled(c.position)) for c in s.cells),
        mus=tuple(dataclasses.replace(mu, position=scaled(mu.position)) for mu in s.mus),
        pathloss_exponent=s.pathloss_exponent,
    )
    for mu, mu_big in zip(s.mus, big.mus):
        assert compute_sir(big, mu_big) == pytest.approx(compute_sir(s, mu), rel=1e-9)
