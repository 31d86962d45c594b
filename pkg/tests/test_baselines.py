import pytest

import mecsfc
from mecsfc.baselines import place_home_only, solve_gojra, solve_hoda
from mecsfc.jcora import estimate_remote_alloc
from mecsfc.radio import uplink_quote
from mecsfc.scenario import ServiceRequest
from mecsfc.types import RequestKey

K0 = RequestKey(0, 0, 0)
K1 = RequestKey(1, 0, 0)


def test_gojra_offloads_everything_that_fits(scenario):
    assignment, report = solve_gojra(scenario)
    assert assignment.hosts == {K0: (0, 0), K1: (1, 1)}
    assert report.algorithm == "gojra"
    assert report.feasible


def test_gojra_without_server_capacity_runs_locally(make_scenario):
    s = make_scenario(capacities_ghz=(0.1, 0.1))
    assignment, report = solve_gojra(s)
    assert assignment.offloaded_keys == []
    assert report.feasible


def test_hoda_offloads_when_cheaper(make_scenario):
    s = make_scenario(kappa=1e-26)
    assignment, report = solve_hoda(s)
    assert assignment.hosts == {K0: (0, 0), K1: (1, 1)}
    assert report.algorithm == "hoda"
    assert report.feasible


def test_hoda_keeps_cheap_requests_local(scenario):
    assignment, report = solve_hoda(scenario)
    assert assignment.offloaded_keys == []
    assert report.n_offloaded == 0


def test_hoda_offloads_requests_that_do_not_fit(make_scenario):
    s = make_scenario(max_clock_hz=0.5e9)
    assignment, report = solve_hoda(s)
    assert assignment.offloaded_keys == [K0, K1]


def test_home_only_respects_priority(make_scenario):
    requests = tuple(
        ServiceRequest(id=i, zeta=0.5, chain=(0, 1), xi=(1.0, 0.5), cycles_per_bit=(250.0, 500.0))
        for i in range(2)
    )
    # each request needs about 0.51 GHz, server 0 has room for one
    s = make_scenario(capacities_ghz=(0.8, 3.6), requests=requests)
    mu = s.mus[0]
    estimates = {
        RequestKey(0, 0, r.id): estimate_remote_alloc(s, mu, r, uplink_quote(s, mu, r), hop_budget_s=0.0)
        for r in mu.requests
    }
    result = place_home_only(s, estimates, {RequestKey(0, 0, 0): 1.0, RequestKey(0, 0, 1): 2.0})
    assert result.hosts == {RequestKey(0, 0, 1): (0, 0)}
    assert result.unplaced == [RequestKey(0, 0, 0)]


def test_baselines_stay_on_home_servers(small_config):
    s = mecsfc.generate_scenario(small_config)
    for solve in (solve_gojra, solve_hoda):
        assignment, report = solve(s)
        for key in assignment.offloaded_keys:
            assert set(assignment.hosts[key]) == {key.cell}
        assert report.objective == pytest.approx(mecsfc.normalized_cost(assignment, s).total)


def _competing_requests():
    # request 0 needs 0.3 GHz locally, request 1 needs 0.06 GHz
    return (
        ServiceRequest(id=0, zeta=0.3, chain=(0,), xi=(1.0,), cycles_per_bit=(2000.0,)),
        ServiceRequest(id=1, zeta=0.6, chain=(0,), xi=(1.0,), cycles_per_bit=(200.0,)),
    )


def test_gojra_places_requests_that_do_not_fit_first(make_scenario):
    # only one request fits on the MU and only one on the home server
    s = make_scenario(max_clock_hz=0.35e9, capacities_ghz=(0.34, 0.34), requests=_competing_requests())
    assignment, report = solve_gojra(s)
    assert assignment.hosts == {RequestKey(0, 0, 0): (0,), RequestKey(1, 0, 0): (1,)}
    assert assignment.local_keys == [RequestKey(0, 0, 1), RequestKey(1, 0, 1)]
    assert report.feasible
    assert report.infeasible_requests == []


def _big_and_small_requests():
    # about 0.507 GHz and 0.05 GHz locally
    return (
        ServiceRequest(id=0, zeta=0.5, chain=(0, 1), xi=(1.0, 0.5), cycles_per_bit=(250.0, 500.0)),
        ServiceRequest(id=1, zeta=0.5, chain=(0,), xi=(1.0,), cycles_per_bit=(100.0,)),
    )


@pytest.mark.parametrize("solve", [solve_gojra, solve_hoda])
def test_baselines_offload_another_request_when_home_server_is_small(make_scenario, solve):
    # the large request fits neither on the MU next to the small one nor on the home server
    s = make_scenario(max_clock_hz=0.53e9, capacities_ghz=(0.3, 0.3), requests=_big_and_small_requests())
    assignment, report = solve(s)
    assert assignment.hosts == {RequestKey(0, 0, 1): (0,), RequestKey(1, 0, 1): (1,)}
    assert assignment.local_keys == [RequestKey(0, 0, 0), RequestKey(1, 0, 0)]
    assert report.feasible
