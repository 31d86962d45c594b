import pytest

import mecsfc
from mecsfc import Assignment, validate
from mecsfc.jcora import local_allocation
from mecsfc.jcora._validate import CONSTRAINTS
from mecsfc.types import RequestKey

K0 = RequestKey(0, 0, 0)
K1 = RequestKey(1, 0, 0)


def _all_local(s, factor=1.0):
    a = Assignment()
    for key, mu, r in s.requests():
        a.set_local(key, local_allocation(mu, r) * factor)
    return a


def test_all_local_is_feasible(scenario):
    report = validate(_all_local(scenario), scenario)
    assert report.ok
    assert report.violated == []
    assert list(report.checks) == list(CONSTRAINTS)
    assert all(c.worst == 0.0 for c in report.checks.values())
    assert repr(report) == "<FeasibilityReport> all constraints satisfied"


def test_slow_clocks_miss_deadline(scenario):
    report = validate(_all_local(scenario, factor=0.5), scenario)
    assert report.violated == ["deadline"]
    # half the clock, twice the delay
    assert report["deadline"].worst == pytest.approx(1.0)
    assert report["deadline"].n_violations == 2
    assert "deadline" in repr(report)


def test_deadline_tolerance(scenario):
    a = _all_local(scenario, factor=1 - 1e-10)
    assert validate(a, scenario).ok
    mecsfc.set_option("validate.delay_tol", 1e-12)
    assert validate(a, scenario).violated == ["deadline"]


def test_local_clock_limit(make_scenario):
    s = make_scenario(max_clock_hz=0.5e9)
    report = validate(_all_local(s), s)
    assert report.violated == ["local_capacity"]
    assert report["local_capacity"].offenders == ["0/0", "1/0"]


def test_missing_decision(scenario):
    a = _all_local(scenario)
    del a.offload[K1]
    report = validate(a, scenario)
    assert report.violated == ["binary_decisions"]
    assert report["binary_decisions"].offenders == ["1/0/0"]


def test_non_positive_clock(scenario):
    a = _all_local(scenario)
    a.local_clocks[K0] = (0.0, 1e9)
    assert "positive_clocks" in validate(a, scenario).violated


def test_offloaded_home_server_is_feasible(scenario):
    a = _all_local(scenario)
    a.set_offloaded(K0, (0, 0), (0.6e9, 0.6e9))
    assert validate(a, scenario).ok


def test_non_adjacent_hosts(make_scenario):
    s = make_scenario(kind="ring", n_edge=4)
    a = _all_local(s)
    # servers 0 and 2 are not linked on the ring
    a.set_offloaded(K0, (0, 2), (0.6e9, 0.6e9))
    assert validate(a, s).violated == ["chain_adjacency"]


def test_unsupported_function(make_scenario):
    s = make_scenario(blacklist={0: [1]})
    a = _all_local(s)
    a.set_offloaded(K0, (0, 0), (0.6e9, 0.6e9))
    assert validate(a, s).violated == ["function_library"]


def test_unknown_server(scenario):
    a = _all_local(scenario)
    a.set_offloaded(K0, (0, 7), (0.6e9, 0.6e9))
    assert validate(a, scenario).violated == ["single_placement"]


def test_server_overload(scenario):
    a = _all_local(scenario)
    a.set_offloaded(K0, (0, 0), (1e9, 1e9))
    report = validate(a, scenario)
    assert report.violated == ["server_capacity"]
    assert report["server_capacity"].worst == pytest.approx(2.0 / 1.7 - 1)
    assert report["server_capacity"].offenders == ["0"]


def test_report_tables(scenario):
    report = validate(_all_local(scenario, factor=0.5), scenario)
    df = report.to_dataframe()
    assert list(df.index) == list(CONSTRAINTS)
    assert not df.loc["deadline", "passed"]
    d = report.to_dict()
    assert d["deadline"]["n_violations"] == 2
    assert d["server_capacity"] == {"passed": True, "worst": 0.0, "n_violations": 0}
