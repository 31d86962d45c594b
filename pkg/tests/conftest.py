import pytest

import mecsfc
from mecsfc.scenario import Cell, MobileUser, Scenario, ServiceRequest, build_topology


def two_cell_scenario(
    *,
    max_clock_hz=2e9,
    kappa=1e-27,
    capacities_ghz=(1.7, 3.6),
    kind="full_mesh",
    n_edge=2,
    blacklist=None,
    requests=None,
    deadline_s=1.0,
    u_bits=1e6,
):
    """Two cells, one MU each, 100 m from its own base station and 1500 m from the other

    The default request processes all input data with two functions,
    cycles per bit (250, 500) and output ratio 0.5.
    """
    graph = build_topology(
        kind, n_edge, edge_capacities_ghz=capacities_ghz, blacklist=blacklist
    )
    cells = (
        Cell(bs_id=0, position=(0.0, 0.0), antennas=64, bandwidth_hz=1e6, n_mus=1),
        Cell(bs_id=1, position=(1600.0, 0.0), antennas=64, bandwidth_hz=1e6, n_mus=1),
    )
    if requests is None:
        requests = (
            ServiceRequest(id=0, zeta=1.0, chain=(0, 1), xi=(1.0, 0.5), cycles_per_bit=(250.0, 500.0)),
        )
    mus = tuple(
        MobileUser(
            cell=s,
            index=0,
            position=pos,
            max_clock_hz=max_clock_hz,
            kappa=kappa,
            u_bits=u_bits,
            deadline_s=deadline_s,
            energy_budget_j=0.1,
            compute_budget_usd=0.035,
            tx_power_w=0.1,
            requests=tuple(requests),
        )
        for s, pos in ((0, (100.0, 0.0)), (1, (1500.0, 0.0)))
    )
    return Scenario(graph=graph, cells=cells, mus=mus)


@pytest.fixture
def make_scenario():
    return two_cell_scenario


@pytest.fixture
def scenario():
    return two_cell_scenario()


@pytest.fixture
def small_config():
    return mecsfc.ScenarioConfig(n_cells=2, mus_per_cell=2, requests_per_mu=3)


@pytest.fixture(autouse=True)
def reset_options():
    yield
    mecsfc.reset_option("all")
