import numpy as np
import pytest
from scipy.optimize import minimize

import mecsfc
from mecsfc.costs import backhaul_delay, compute_cost
from mecsfc.jcora import estimate_remote_alloc, place_functions_gtda, solve_slave
from mecsfc.radio import uplink_quote
from mecsfc.types import InfeasibleError, RequestKey

K0 = RequestKey(0, 0, 0)
K1 = RequestKey(1, 0, 0)
CYCLES = 5e8  # both functions together, 250e6 each


def _budget(s, key):
    mu = s.mu(key.cell, key.mu)
    return mu.deadline_s - uplink_quote(s, mu, mu.requests[key.request]).delay_s


def test_empty_placement(scenario):
    sol = solve_slave(scenario, {})
    assert sol.clocks == {}
    assert sol.objective == 0.0


def test_equal_clocks_on_home_server(scenario):
    sol = solve_slave(scenario, {K0: (0, 0), K1: (1, 1)})
    for key in (K0, K1):
        f = CYCLES / _budget(scenario, key)
        assert sol.clocks[key] == pytest.approx((f, f), rel=1e-5)
    assert not sol.feasibility_search
    assert sol.kkt.max() < 1e-6


def test_backhaul_shortens_the_compute_budget(scenario):
    sol = solve_slave(scenario, {K0: (0, 1)})
    f = CYCLES / (_budget(scenario, K0) - 0.01)
    assert sol.clocks[K0] == pytest.approx((f, f), rel=1e-5)
    # the first function pays no backhaul, the second one hop
    assert sol.slack[K0][0] == pytest.approx(250e6 / f, rel=1e-5)
    assert sol.slack[K0][1] == pytest.approx(0.01 + 250e6 / f, rel=1e-5)


def test_time_budget_is_used_exactly(scenario):
    sol = solve_slave(scenario, {K0: (0, 0), K1: (1, 1)})
    for key in (K0, K1):
        assert sum(sol.slack[key]) == pytest.approx(_budget(scenario, key), abs=1e-12)
        assert sol.delay_multipliers[key] > 0


def test_objective_is_the_computing_cost(scenario):
    sol = solve_slave(scenario, {K0: (0, 0)})
    f = np.asarray(sol.clocks[K0])
    cost = float(np.sum(compute_cost(f, [250e6, 250e6])))
    assert sol.objective == pytest.approx(cost, rel=1e-9)


def test_shared_server_capacity_binds(make_scenario):
    # server 1 hosts the second function of MU 0 and both functions of MU 1;
    # the price-optimal clocks would need about 1.56 GHz there
    s = make_scenario(capacities_ghz=(1.7, 1.5))
    sol = solve_slave(s, {K0: (0, 1), K1: (1, 1)})
    assert sol.feasibility_search
    load = sol.clocks[K0][1] + sum(sol.clocks[K1])
    assert load <= 1.5e9 * (1 + 1e-9)
    assert load == pytest.approx(1.5e9, rel=1e-4)
    # MU 0 moves work to the server with room
    assert sol.clocks[K0][0] > sol.clocks[K0][1]
    for key in (K0, K1):
        assert sum(sol.slack[key]) == pytest.approx(_budget(s, key), abs=1e-12)


def test_overloaded_server_raises(make_scenario):
    # both functions on a 0.9 GHz server need at least 1.03 GHz
    s = make_scenario(capacities_ghz=(0.9, 3.6))
    with pytest.raises(InfeasibleError, match="server 0") as err:
        solve_slave(s, {K0: (0, 0)})
    assert err.value.server == 0
    assert err.value.violation > 0


def test_no_compute_budget_raises(make_scenario):
    s = make_scenario(deadline_s=0.04)
    with pytest.raises(InfeasibleError, match="no delay budget"):
        solve_slave(s, {K0: (0, 1)})


def _placed_requests(s):
    estimates = {}
    for key, mu, r in s.requests():
        try:
            estimates[key] = estimate_remote_alloc(s, mu, r, uplink_quote(s, mu, r))
        except (InfeasibleError, ValueError):
            continue
    return place_functions_gtda(s, estimates).hosts


def _slsqp_oracle(s, hosts):
    """Minimum computing cost over the per-function time budgets, by SLSQP"""
    f_ref = mecsfc.get_option("costs.price.f_ref")
    cap = s.graph.capacity
    keys = sorted(hosts)
    D, delta, w, host, blocks, budget = [], [], [], [], [], []
    for key in keys:
        mu = s.mu(key.cell, key.mu)
        r = mu.requests[key.request]
        blocks.append(slice(len(D), len(D) + len(r)))
        D.extend(r.cycles(mu.u_bits))
        delta.extend(backhaul_delay(s.graph, hosts[key], s.home_server(mu)))
        w.extend([mu.slave_weight] * len(r))
        host.extend(hosts[key])
        budget.append(_budget(s, key))
    D, delta, w, host = map(np.asarray, (D, delta, w, host))
    lower = delta + D / np.array([cap[m] for m in host])

    def cost(y):
        f = D / (y - delta)
        return float(np.sum(w * np.exp(-s.eta) * np.expm1(f / f_ref) * s.vartheta * f_ref * D / f))

    y0 = np.empty(D.size)
    for sl, b in zip(blocks, budget):
        room = b - lower[sl].sum()
        y0[sl] = lower[sl] + room * D[sl] / D[sl].sum()
    scale = cost(y0)

    constraints = [{"type": "eq", "fun": lambda y, sl=sl, b=b: y[sl].sum() - b} for sl, b in zip(blocks, budget)]
    for m in sorted(set(host.tolist())):
        idx = host == m
        constraints.append(
            {"type": "ineq", "fun": lambda y, idx=idx, m=m: 1.0 - np.sum(D[idx] / (cap[m] * (y[idx] - delta[idx])))}
        )
    ref = minimize(
        lambda y: cost(y) / scale,
        y0,
        method="SLSQP",
        bounds=list(zip(lower, [None] * D.size)),
        constraints=constraints,
        options={"ftol": 1e-13, "maxiter": 1000},
    )
    return ref, cost(ref.x)


@pytest.mark.parametrize("seed", range(1, 6))
def test_matches_slsqp_on_generated_instances(seed):
    config = mecsfc.ScenarioConfig(n_cells=4, mus_per_cell=2, requests_per_mu=2)
    s = mecsfc.generate_scenario(config, seed)
    hosts = _placed_requests(s)
    assert len(hosts) >= 2

    sol = solve_slave(s, hosts)
    ref, ref_cost = _slsqp_oracle(s, hosts)
    assert sol.objective <= ref_cost * (1 + 1e-6)
    assert sol.objective == pytest.approx(ref_cost, rel=1e-4)

    load = {}
    for key, clocks in sol.clocks.items():
        assert sum(sol.slack[key]) == pytest.approx(_budget(s, key), abs=1e-9)
        for m, f in zip(hosts[key], clocks):
            load[m] = load.get(m, 0.0) + f
    for m, total in load.items():
        assert total <= s.graph.capacity[m] * (1 + 1e-9)
