from __future__ import annotations
from typing import Dict, Iterable, Mapping, Optional, Sequence, Union

import networkx as nx

from ..types import TopologyKind
from ._types import BackhaulGraph

GHZ = 1e9

DEFAULT_EDGE_CAPACITIES_GHZ = (1.7, 3.6, 3.8, 4.5)
DEFAULT_CORE_CAPACITIES_GHZ = (4.5,)


def _physical_links(kind: TopologyKind, n_edge: int, n_core: int) -> nx.Graph:
    edge_ids = list(range(n_edge))
    core_ids = list(range(n_edge, n_edge + n_core))

    if kind == TopologyKind.FULL_MESH:
        return nx.complete_graph(edge_ids + core_ids)

    if kind == TopologyKind.RING:
        if n_core > 0:
            raise ValueError("Ring topology connects edge servers only, n_core_servers must be 0")
        if n_edge < 3:
            raise ValueError(f"Ring topology needs at least 3 servers, got {n_edge}")
        return nx.cycle_graph(edge_ids)

    if kind == TopologyKind.MESH_CENTER_CLOUD:
        if n_core < 1:
            raise ValueError("Mesh-center-cloud topology needs at least one core server")
        g = nx.complete_bipartite_graph(len(core_ids), len(edge_ids))
        # bipartite builder numbers the core side first
        mapping = {i: core_ids[i] for i in range(n_core)}
        mapping.update({n_core + j: edge_ids[j] for j in range(n_edge)})
        return nx.relabel_nodes(g, mapping)

    if kind == TopologyKind.MESH_CENTER_BS:
        # star centred on base station server 0
        return nx.star_graph(edge_ids + core_ids)

    raise ValueError(f"Unknown topology {kind}")


def _cycle(values: Sequence[float], n: int) -> list:
    if n > 0 and len(values) == 0:
        raise ValueError("Capacity list must not be empty")
    return [float(values[i % len(values)]) for i in range(n)]


def build_topology(
    kind: Union[str, TopologyKind],
    n_edge_servers: int,
    n_core_servers: int = 0,
    setup_delay: float = 0.010,
    *,
    edge_capacities_ghz: Sequence[float] = DEFAULT_EDGE_CAPACITIES_GHZ,
    core_capacities_ghz: Sequence[float] = DEFAULT_CORE_CAPACITIES_GHZ,
    n_functions: int = 4,
    blacklist: Optional[Mapping[int, Iterable[int]]] = None,
) -> BackhaulGraph:
    """Build a backhaul graph of edge and core servers

    Servers 0..n_edge_servers-1 are co-located with base stations 0..n-1,
    core servers follow. Every physical link becomes two directed edges with
    the same setup delay.

    * full_mesh: every pair of servers is linked
    * ring: edge servers on a cycle
    * mesh_center_cloud: every core server is linked to every edge server
    * mesh_center_bs: edge server 0 is linked to every other server

    Parameters
    ----------
    kind : str or TopologyKind
        topology
    n_edge_servers : int
        number of base-station servers, >= 1
    n_core_servers : int, optional
        number of core (cloud) servers, by default 0
    setup_delay : float, optional
        link setup delay in seconds, by default 0.010
    edge_capacities_ghz, core_capacities_ghz : Sequence[float], optional
        capacities assigned to the servers in order, repeated as needed
    n_functions : int, optional
        size of the function catalogue, by default 4
    blacklist : Mapping[int, Iterable[int]], optional
        functions a server cannot execute

    Returns
    -------
    BackhaulGraph

    Examples
    --------
    >>> g = build_topology("full_mesh", 4)
    >>> len(g.edges)
    12
    >>> len(build_topology("ring", 4).edges)
    8
    >>> len(build_topology("mesh_center_cloud", 4, 1).edges)
    8
    """
    kind = TopologyKind.from_string(kind) if isinstance(kind, str) else kind
    if n_edge_servers < 1:
        raise ValueError(f"n_edge_servers must be >= 1, got {n_edge_servers}")
    if n_core_servers < 0:
        raise ValueError(f"n_core_servers must be >= 0, got {n_core_servers}")
    if not setup_delay > 0:
        raise ValueError(f"setup_delay must be > 0, got {setup_delay}")

    links = _physical_links(kind, n_edge_servers, n_core_servers).to_directed()
    nodes = tuple(range(n_edge_servers + n_core_servers))
    edges = {(int(x), int(y)): float(setup_delay) for x, y in sorted(links.edges())}

    capacity = dict(
        zip(
            nodes,
            [c * GHZ for c in _cycle(edge_capacities_ghz, n_edge_servers)]
            + [c * GHZ for c in _cycle(core_capacities_ghz, n_core_servers)],
        )
    )

    catalogue = frozenset(range(n_functions))
    blacklist = blacklist or {}
    unknown = set(blacklist) - set(nodes)
    if unknown:
        raise KeyError(f"Blacklist refers to unknown servers {sorted(unknown)}")
    library: Dict[int, frozenset] = {
        v: catalogue - frozenset(int(f) for f in blacklist.get(v, ())) for v in nodes
    }

    return BackhaulGraph(
        nodes=nodes,
        edges=edges,
        edge_servers=frozenset(range(n_edge_servers)),
        capacity=capacity,
        library=library,
        kind=kind,
    )
