from __future__ import annotations
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, Iterator, Optional, Tuple

import networkx as nx
import numpy as np

from ..types import RequestKey, TopologyKind


@dataclass(frozen=True)
class BackhaulGraph:
    """Directed graph of computation servers (CoSs)

    Parameters
    ----------
    nodes : Tuple[int, ...]
        server ids
    edges : Dict[Tuple[int, int], float]
        directed links (x, y) with their setup delay in seconds
    edge_servers : FrozenSet[int]
        servers co-located with a base station, server id == cell index
    capacity : Dict[int, float]
        computing capacity per server in cycles/s
    library : Dict[int, FrozenSet[int]]
        function ids each server can execute
    kind : TopologyKind, optional
        topology the graph was built as
    """

    nodes: Tuple[int, ...]
    edges: Dict[Tuple[int, int], float]
    edge_servers: FrozenSet[int]
    capacity: Dict[int, float]
    library: Dict[int, FrozenSet[int]]
    kind: Optional[TopologyKind] = None

    def __post_init__(self) -> None:
        node_set = set(self.nodes)
        if len(node_set) != len(self.nodes):
            raise ValueError("Server ids must be unique")
        for (x, y), delay in self.edges.items():
            if x not in node_set or y not in node_set:
                raise ValueError(f"Edge ({x}, {y}) refers to an unknown server")
            if x == y:
                raise ValueError(f"Self loop on server {x}")
            if not delay > 0:
                raise ValueError(f"Setup delay of edge ({x}, {y}) must be > 0, got {delay}")
        if not self.edge_servers <= node_set:
            raise ValueError(f"Edge servers {sorted(self.edge_servers - node_set)} are not servers")
        for v in self.nodes:
            if not self.capacity.get(v, 0.0) > 0:
                raise ValueError(f"Capacity of server {v} must be > 0")
            if v not in self.library:
                raise ValueError(f"Server {v} has no function library")

    @property
    def n_servers(self) -> int:
        return len(self.nodes)

    @property
    def functions(self) -> FrozenSet[int]:
        """All function ids offered by at least one server"""
        return frozenset().union(*self.library.values())

    @cached_property
    def digraph(self) -> nx.DiGraph:
        """networkx view of the graph with `delay`, `capacity` and `library` attributes"""
        g = nx.DiGraph()
        for v in self.nodes:
            g.add_node(v, capacity=self.capacity[v], library=self.library[v])
        for (x, y), delay in self.edges.items():
            g.add_edge(x, y, delay=delay)
        return g

    def connected(self, x: int, y: int) -> bool:
        """Connectivity indicator: True iff the directed link (x, y) exists"""
        return (x, y) in self.edges

    def reachable_in_one_hop(self, x: int, y: int) -> bool:
        """Same server or directly connected"""
        return x == y or (x, y) in self.edges

    def delay(self, x: int, y: int) -> float:
        """Setup delay of link (x, y), 0 for x == y"""
        if x == y:
            return 0.0
        try:
            return self.edges[(x, y)]
        except KeyError as e:
            raise KeyError(f"Servers {x} and {y} are not connected") from e

    def in_neighbors(self, v: int) -> FrozenSet[int]:
        return frozenset(self.digraph.predecessors(v))

    def out_neighbors(self, v: int) -> FrozenSet[int]:
        return frozenset(self.digraph.successors(v))

    def supports(self, v: int, function: int) -> bool:
        return function in self.library[v]

    @property
    def max_delay(self) -> float:
        return max(self.edges.values(), default=0.0)


@dataclass(frozen=True)
class Cell:
    """Base station s with its co-located edge server `bs_id`"""

    bs_id: int
    position: Tuple[float, float]
    antennas: int
    bandwidth_hz: float
    n_mus: int

    def __post_init__(self) -> None:
        if not self.bandwidth_hz > 0:
            raise ValueError(f"Bandwidth of cell {self.bs_id} must be > 0")
        if self.antennas < 8 * self.n_mus:
            raise ValueError(
                f"Cell {self.bs_id} needs at least 8 antennas per MU "
                f"({self.antennas} antennas, {self.n_mus} MUs)"
            )


@dataclass(frozen=True)
class ServiceRequest:
    """Request r: a chain of functions applied to a fraction `zeta` of the MU's input

    Parameters
    ----------
    id : int
        request index within the MU
    zeta : float
        fraction of the MU input data this request processes
    chain : Tuple[int, ...]
        function ids in execution order
    xi : Tuple[float, ...]
        data ratio reaching each function (product of upstream output/input ratios)
    cycles_per_bit : Tuple[float, ...]
        CPU cycles per input bit of each function
    """

    id: int
    zeta: float
    chain: Tuple[int, ...]
    xi: Tuple[float, ...]
    cycles_per_bit: Tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.chain) == 0:
            raise ValueError(f"Request {self.id} has an empty chain")
        if not (len(self.chain) == len(self.xi) == len(self.cycles_per_bit)):
            raise ValueError(f"Request {self.id}: chain, xi and cycles_per_bit lengths differ")
        if not 0 <= self.zeta <= 1:
            raise ValueError(f"Request {self.id}: zeta must be in [0, 1], got {self.zeta}")
        if min(self.xi) <= 0:
            raise ValueError(f"Request {self.id}: xi must be > 0")
        if min(self.cycles_per_bit) <= 0:
            raise ValueError(f"Request {self.id}: cycles_per_bit must be > 0")

    def __len__(self) -> int:
        return len(self.chain)

    def data_bits(self, u_bits: float) -> float:
        """Input bits of the request (uplink payload)"""
        return self.zeta * u_bits

    def function_bits(self, u_bits: float) -> np.ndarray:
        """Input bits reaching each function"""
        return self.zeta * u_bits * np.asarray(self.xi)

    def cycles(self, u_bits: float) -> np.ndarray:
        """CPU cycles of each function"""
        return self.function_bits(u_bits) * np.asarray(self.cycles_per_bit)

    @property
    def output_ratios(self) -> Tuple[float, ...]:
        """Output/input data ratio of each function but the last"""
        return tuple(b / a for a, b in zip(self.xi[:-1], self.xi[1:]))


@dataclass(frozen=True)
class MobileUser:
    """MU k in cell s"""

    cell: int
    index: int
    position: Tuple[float, float]
    max_clock_hz: float
    kappa: float
    u_bits: float
    deadline_s: float
    energy_budget_j: float
    compute_budget_usd: float
    tx_power_w: float
    requests: Tuple[ServiceRequest, ...]
    slave_weight: float = 1.0

    def __post_init__(self) -> None:
        for name in ("max_clock_hz", "deadline_s", "energy_budget_j", "compute_budget_usd"):
            if not getattr(self, name) > 0:
                raise ValueError(f"MU {self.cell}/{self.index}: {name} must be > 0")
        if self.kappa < 0 or self.tx_power_w < 0 or self.u_bits < 0:
            raise ValueError(f"MU {self.cell}/{self.index}: kappa, tx_power_w, u_bits must be >= 0")
        total = sum(r.zeta for r in self.requests)
        if total > 1 + 1e-12:
            raise ValueError(f"MU {self.cell}/{self.index}: sum of zeta is {total} > 1")

    @property
    def key(self) -> Tuple[int, int]:
        return (self.cell, self.index)


@dataclass(frozen=True)
class Scenario:
    """Static description of the MEC system

    MUs are ordered by cell, then index. Server `s` is the edge server
    co-located with the base station of cell `s`.
    """

    graph: BackhaulGraph
    cells: Tuple[Cell, ...]
    mus: Tuple[MobileUser, ...]
    pathloss_exponent: float = 3.8
    theta_tx: float = 0.8
    theta_cp: float = 0.2
    eta: float = 1.0
    vartheta: float = 2.5e-12
    seed: Optional[int] = None
    _index: Dict[Tuple[int, int], int] = field(
        default_factory=dict, init=False, repr=False, compare=False
    )

    def __post_init__(self) -> None:
        if self.theta_tx < 0 or self.theta_cp < 0 or abs(self.theta_tx + self.theta_cp - 1) > 1e-12:
            raise ValueError(
                f"theta_tx and theta_cp must be >= 0 and sum to 1, got {self.theta_tx}, {self.theta_cp}"
            )
        for i, c in enumerate(self.cells):
            if c.bs_id != i:
                raise ValueError(f"Cell {i} has bs_id {c.bs_id}, expected {i}")
            if c.bs_id not in self.graph.edge_servers:
                raise ValueError(f"Base station {c.bs_id} has no co-located edge server")
        for i, mu in enumerate(self.mus):
            if not 0 <= mu.cell < len(self.cells):
                raise ValueError(f"MU {mu.cell}/{mu.index} belongs to unknown cell {mu.cell}")
            if mu.key in self._index:
                raise ValueError(f"Duplicate MU {mu.cell}/{mu.index}")
            self._index[mu.key] = i

    def mu(self, cell: int, index: int) -> MobileUser:
        try:
            return self.mus[self._index[(cell, index)]]
        except KeyError as e:
            raise KeyError(f"No MU {cell}/{index}") from e

    def mus_in_cell(self, cell: int) -> Tuple[MobileUser, ...]:
        return tuple(m for m in self.mus if m.cell == cell)

    def home_server(self, mu: MobileUser) -> int:
        """Edge server co-located with the MU's base station"""
        return self.cells[mu.cell].bs_id

    def request(self, key: RequestKey) -> ServiceRequest:
        return self.mu(key.cell, key.mu).requests[key.request]

    def requests(self) -> Iterator[Tuple[RequestKey, MobileUser, ServiceRequest]]:
        """All requests in canonical (cell, mu, request) order"""
        for mu in self.mus:
            for r in mu.requests:
                yield RequestKey(mu.cell, mu.index, r.id), mu, r

    @property
    def n_requests(self) -> int:
        return sum(len(mu.requests) for mu in self.mus)

    def to_dict(self) -> dict:
        from ._io import scenario_to_dict

        return scenario_to_dict(self)

    @staticmethod
    def from_dict(d: dict) -> "Scenario":
        from ._io import scenario_from_dict

        return scenario_from_dict(d)

    def __repr__(self) -> str:
        kind = self.graph.kind or "custom"
        return (
            f"<Scenario> {len(self.cells)} cells, {len(self.mus)} MUs, "
            f"{self.n_requests} requests, {self.graph.n_servers} servers ({kind})"
        )
