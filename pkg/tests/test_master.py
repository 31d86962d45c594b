import itertools

import numpy as np
import pytest

from mecsfc.jcora import (
    RemoteEstimate,
    estimate_offload_quote,
    estimate_remote_alloc,
    hop_budget,
    place_functions_gtda,
)
from mecsfc.radio import uplink_quote
from mecsfc.scenario import ServiceRequest
from mecsfc.types import InfeasibleError, RequestKey

K0 = RequestKey(0, 0, 0)
K1 = RequestKey(1, 0, 0)


def _estimates(s):
    out = {}
    for key, mu, r in s.requests():
        out[key] = estimate_remote_alloc(s, mu, r, uplink_quote(s, mu, r))
    return out


def test_hop_budget(scenario):
    r = scenario.mus[0].requests[0]
    assert hop_budget(scenario, r) == pytest.approx(0.02)


def test_estimate_uses_the_delay_budget(scenario):
    mu = scenario.mus[0]
    r = mu.requests[0]
    up = uplink_quote(scenario, mu, r)
    est = estimate_remote_alloc(scenario, mu, r, up)
    assert est.hop_budget_s == pytest.approx(0.02)
    assert est.slack_s == pytest.approx(1.0 - up.delay_s - 0.02)
    # same clock for every function, compute time fills the slack
    assert est.clocks_hz[0] == pytest.approx(est.clocks_hz[1], rel=1e-12)
    assert np.sum(r.cycles(mu.u_bits) / np.asarray(est.clocks_hz)) == pytest.approx(est.slack_s, rel=1e-8)
    assert est.clocks_hz[0] == pytest.approx(0.528e9, rel=1e-2)


def test_estimate_multiplier_matches_clock(scenario):
    mu = scenario.mus[0]
    r = mu.requests[0]
    est = estimate_remote_alloc(scenario, mu, r, uplink_quote(scenario, mu, r))
    g = est.clocks_hz[0] / 1e9
    K = est.multiplier * mu.compute_budget_usd * np.exp(-scenario.eta) * scenario.vartheta
    assert (g - 1.0) * np.exp(g) + 1.0 == pytest.approx(K, rel=1e-9)
    assert est.multiplier > 0


def test_estimate_single_function(make_scenario):
    r = ServiceRequest(id=0, zeta=1.0, chain=(2,), xi=(1.0,), cycles_per_bit=(250.0,))
    s = make_scenario(requests=(r,))
    mu = s.mus[0]
    up = uplink_quote(s, mu, r)
    est = estimate_remote_alloc(s, mu, r, up)
    slack = 1.0 - up.delay_s - 0.01
    assert est.clocks_hz == pytest.approx((250e6 / slack,))


def test_estimate_without_budget_raises(make_scenario):
    s = make_scenario(deadline_s=0.04)
    mu = s.mus[0]
    r = mu.requests[0]
    with pytest.raises(InfeasibleError, match="delay budget") as err:
        estimate_remote_alloc(s, mu, r, uplink_quote(s, mu, r))
    assert err.value.violation > 0


def test_estimate_offload_quote(scenario):
    mu = scenario.mus[0]
    r = mu.requests[0]
    quote, est = estimate_offload_quote(scenario, mu, r)
    assert quote.hosts is None
    assert quote.backhaul_s == pytest.approx((0.01, 0.01))
    assert quote.delay_s == pytest.approx(mu.deadline_s, rel=1e-8)
    assert quote.clocks_hz == est.clocks_hz
    assert quote.cost_usd > 0


def test_estimate_offload_quote_home_only(scenario):
    mu = scenario.mus[0]
    quote, est = estimate_offload_quote(scenario, mu, mu.requests[0], hop_budget_s=0.0)
    assert est.hop_budget_s == 0.0
    assert sum(quote.backhaul_s) == 0.0
    assert est.demand_hz == pytest.approx(5e8 / est.slack_s * 2, rel=1e-8)


def test_place_on_home_servers(scenario):
    result = place_functions_gtda(scenario, _estimates(scenario))
    assert result.hosts == {K0: (0, 0), K1: (1, 1)}
    assert result.unplaced == []
    demand = _estimates(scenario)[K0].demand_hz
    assert result.free_capacity[0] == pytest.approx(1.7e9 * (1 - 1e-6) - demand)


def test_place_blacklisted_function_goes_to_neighbour(make_scenario):
    s = make_scenario(blacklist={0: [1]})
    result = place_functions_gtda(s, _estimates(s))
    assert result.hosts[K0] == (0, 1)
    assert result.hosts[K1] == (1, 1)
    # server 1 has more free capacity per in-neighbour
    assert result.ranking[1] > result.ranking[0]


def test_place_unsupported_function_is_released(make_scenario):
    s = make_scenario(blacklist={0: [1], 1: [1]})
    result = place_functions_gtda(s, _estimates(s), margin=0.0)
    assert result.hosts == {}
    assert result.unplaced == [K0, K1]
    assert result.free_capacity == pytest.approx(s.graph.capacity)


def test_place_requires_adjacent_hosts(make_scenario):
    # ring 0-1-2-3-0, function 1 only on server 2
    s = make_scenario(kind="ring", n_edge=4, blacklist={0: [1], 1: [1], 3: [1]})
    result = place_functions_gtda(s, _estimates(s))
    assert result.unplaced == [K0]
    assert result.hosts == {K1: (1, 2)}


def test_place_nothing(scenario):
    result = place_functions_gtda(scenario, {})
    assert result.hosts == {}
    assert result.unplaced == []


def _valid_hosts(s, key, hosts):
    mu = s.mu(key.cell, key.mu)
    chain = mu.requests[key.request].chain
    prev = (s.home_server(mu),) + tuple(hosts[:-1])
    return all(s.graph.supports(h, fn) for h, fn in zip(hosts, chain)) and all(
        s.graph.reachable_in_one_hop(a, b) for a, b in zip(prev, hosts)
    )


def _fits(s, estimates, hosts_of):
    load = dict.fromkeys(s.graph.nodes, 0.0)
    for key, hosts in hosts_of.items():
        for m, f in zip(hosts, estimates[key].clocks_hz):
            load[m] += f
    return all(load[m] <= s.graph.capacity[m] * (1 + 1e-12) for m in load)


def _most_placeable(s, estimates):
    """Largest number of requests placed together, by enumerating all placements"""
    keys = sorted(estimates)
    options = []
    for key in keys:
        n = len(estimates[key].clocks_hz)
        valid = [h for h in itertools.product(sorted(s.graph.nodes), repeat=n) if _valid_hosts(s, key, h)]
        options.append([None] + valid)
    best = 0
    for combo in itertools.product(*options):
        chosen = {k: h for k, h in zip(keys, combo) if h is not None}
        if len(chosen) > best and _fits(s, estimates, chosen):
            best = len(chosen)
    return best


def _random_instance(make_scenario, rng, blacklist=None, kind="full_mesh"):
    n = int(rng.integers(2, 4))
    chain = tuple(int(f) for f in rng.choice(4, size=n, replace=False))
    request = ServiceRequest(id=0, zeta=1.0, chain=chain, xi=(1.0,) * n, cycles_per_bit=(300.0,) * n)
    capacities = tuple(float(c) for c in rng.uniform(0.3, 1.5, size=3))
    return make_scenario(
        capacities_ghz=capacities, n_edge=3, requests=(request,), blacklist=blacklist, kind=kind
    )


@pytest.mark.parametrize("seed", range(12))
def test_place_never_beats_enumeration(make_scenario, seed):
    rng = np.random.default_rng(seed)
    blacklist = {int(m): [int(rng.integers(4))] for m in rng.choice(3, size=2, replace=False)}
    kind = ["full_mesh", "mesh_center_bs"][seed % 2]
    s = _random_instance(make_scenario, rng, blacklist=blacklist, kind=kind)
    estimates = {
        key: RemoteEstimate(tuple(float(f) for f in rng.uniform(0.2e9, 0.8e9, size=len(r))), 0.0, 0.5, 0.0)
        for key, _, r in s.requests()
    }
    result = place_functions_gtda(s, estimates, margin=0.0)
    assert set(result.hosts) | set(result.unplaced) == set(estimates)
    assert not set(result.hosts) & set(result.unplaced)
    for key, hosts in result.hosts.items():
        assert _valid_hosts(s, key, hosts)
    assert _fits(s, estimates, result.hosts)
    assert len(result.hosts) <= _most_placeable(s, estimates)


@pytest.mark.parametrize("seed", range(12))
def test_place_single_request_matches_enumeration(make_scenario, seed):
    # full mesh, every function everywhere, equal clocks per function
    rng = np.random.default_rng(100 + seed)
    s = _random_instance(make_scenario, rng)
    mu = s.mus[0]
    n = len(mu.requests[0])
    estimates = {K0: RemoteEstimate((float(rng.uniform(0.2e9, 0.8e9)),) * n, 0.0, 0.5, 0.0)}
    result = place_functions_gtda(s, estimates, margin=0.0)
    assert len(result.hosts) == _most_placeable(s, estimates)
