import networkx as nx
import pytest

from mecsfc import TopologyKind, build_topology
from mecsfc.scenario import BackhaulGraph


@pytest.mark.parametrize(
    "kind,n_edge,n_core,n_links",
    [
        ("full_mesh", 4, 0, 6),
        ("full_mesh", 4, 1, 10),
        ("ring", 4, 0, 4),
        ("mesh_center_cloud", 4, 1, 4),
        ("mesh_center_cloud", 4, 2, 8),
        ("mesh_center_bs", 4, 0, 3),
        ("mesh_center_bs", 4, 1, 4),
    ],
)
def test_links_are_bidirectional(kind, n_edge, n_core, n_links):
    g = build_topology(kind, n_edge, n_core)
    assert len(g.edges) == 2 * n_links
    for x, y in g.edges:
        assert g.connected(y, x)
    assert g.n_servers == n_edge + n_core
    assert g.edge_servers == frozenset(range(n_edge))


def test_full_mesh_single_hop():
    g = build_topology(TopologyKind.FULL_MESH, 4)
    for x in g.nodes:
        for y in g.nodes:
            assert g.reachable_in_one_hop(x, y)


def test_ring_neighbours():
    g = build_topology("ring", 4)
    assert g.out_neighbors(0) == frozenset({1, 3})
    assert g.in_neighbors(2) == frozenset({1, 3})
    assert not g.connected(0, 2)


def test_mesh_center_cloud_links_core_to_every_edge_server():
    g = build_topology("mesh_center_cloud", 4, 1)
    assert g.out_neighbors(4) == frozenset({0, 1, 2, 3})
    assert not g.connected(0, 1)


def test_mesh_center_bs_is_a_star_on_server_0():
    g = build_topology("mesh_center_bs", 4)
    assert g.out_neighbors(0) == frozenset({1, 2, 3})
    assert g.out_neighbors(2) == frozenset({0})


def test_ring_needs_three_servers():
    with pytest.raises(ValueError, match="at least 3"):
        build_topology("ring", 2)
    with pytest.raises(ValueError, match="n_core_servers must be 0"):
        build_topology("ring", 4, 1)


def test_mesh_center_cloud_needs_core():
    with pytest.raises(ValueError, match="core server"):
        build_topology("mesh_center_cloud", 4, 0)


def test_unknown_topology_raises():
    with pytest.raises(KeyError, match="not recognized"):
        build_topology("torus", 4)


def test_capacities_cycle_over_servers():
    g = build_topology("full_mesh", 5, 2, edge_capacities_ghz=(1.0, 2.0), core_capacities_ghz=(8.0,))
    assert [g.capacity[v] for v in g.nodes] == [1e9, 2e9, 1e9, 2e9, 1e9, 8e9, 8e9]


def test_default_capacities():
    g = build_topology("full_mesh", 4)
    assert [g.capacity[v] for v in g.nodes] == pytest.approx([1.7e9, 3.6e9, 3.8e9, 4.5e9])


def test_delays():
    g = build_topology("ring", 4, setup_delay=0.02)
    assert g.delay(0, 1) == 0.02
    assert g.delay(3, 3) == 0.0
    assert g.max_delay == 0.02
    with pytest.raises(KeyError, match="not connected"):
        g.delay(0, 2)


def test_blacklist_removes_functions():
    g = build_topology("full_mesh", 3, n_functions=4, blacklist={1: [0, 3]})
    assert g.library[0] == frozenset({0, 1, 2, 3})
    assert g.library[1] == frozenset({1, 2})
    assert not g.supports(1, 3)
    assert g.functions == frozenset({0, 1, 2, 3})


def test_blacklist_unknown_server_raises():
    with pytest.raises(KeyError, match="unknown servers"):
        build_topology("full_mesh", 3, blacklist={7: [0]})


def test_digraph_view():
    g = build_topology("ring", 5)
    d = g.digraph
    assert isinstance(d, nx.DiGraph)
    assert d.number_of_edges() == 10
    assert d.edges[0, 1]["delay"] == 0.010
    assert d.nodes[0]["capacity"] == 1.7e9
    assert nx.is_strongly_connected(d)


def test_graph_validation():
    with pytest.raises(ValueError, match="Self loop"):
        BackhaulGraph(
            nodes=(0, 1),
            edges={(0, 0): 0.01},
            edge_servers=frozenset({0}),
            capacity={0: 1e9, 1: 1e9},
            library={0: frozenset({0}), 1: frozenset({0})},
        )
    with pytest.raises(ValueError, match="Capacity"):
        BackhaulGraph(
            nodes=(0, 1),
            edges={(0, 1): 0.01},
            edge_servers=frozenset({0}),
            capacity={0: 1e9, 1: 0.0},
            library={0: frozenset({0}), 1: frozenset({0})},
        )
