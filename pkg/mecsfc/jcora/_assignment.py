from __future__ import annotations
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import yaml

from ..costs import SystemCost
from ..scenario import Scenario
from ..types import RequestKey


@dataclass
class Assignment:
    """Offloading decision, placement and clock allocation of every request

    Local clocks are kept for every request that has them; they only count
    while the request is executed locally.
    """

    offload: Dict[RequestKey, bool] = field(default_factory=dict)
    local_clocks: Dict[RequestKey, Tuple[float, ...]] = field(default_factory=dict)
    hosts: Dict[RequestKey, Tuple[int, ...]] = field(default_factory=dict)
    remote_clocks: Dict[RequestKey, Tuple[float, ...]] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.offload)

    def is_offloaded(self, key: RequestKey) -> bool:
        try:
            return self.offload[key]
        except KeyError as e:
            raise ValueError(f"No offloading decision for request {key}") from e

    def is_complete_for(self, key: RequestKey) -> bool:
        """Decision present together with the clocks (and hosts) it needs"""
        if key not in self.offload:
            return False
        if self.offload[key]:
            return key in self.hosts and key in self.remote_clocks
        return key in self.local_clocks

    def set_local(self, key: RequestKey, clocks: Optional[Sequence[float]] = None) -> None:
        self.offload[key] = False
        if clocks is not None:
            self.local_clocks[key] = tuple(float(f) for f in clocks)
        self.hosts.pop(key, None)
        self.remote_clocks.pop(key, None)

    def set_offloaded(self, key: RequestKey, hosts: Sequence[int], clocks: Sequence[float]) -> None:
        if len(hosts) != len(clocks):
            raise ValueError(f"Request {key}: {len(hosts)} hosts but {len(clocks)} clocks")
        self.offload[key] = True
        self.hosts[key] = tuple(int(h) for h in hosts)
        self.remote_clocks[key] = tuple(float(f) for f in clocks)

    @property
    def offloaded_keys(self) -> List[RequestKey]:
        return sorted(k for k, x in self.offload.items() if x)

    @property
    def local_keys(self) -> List[RequestKey]:
        return sorted(k for k, x in self.offload.items() if not x)

    def placement_matrix(self, key: RequestKey, n_servers: int) -> np.ndarray:
        """Binary matrix, row l has a single 1 in the column of the server hosting function l"""
        hosts = self.hosts.get(key, ())
        A = np.zeros((len(hosts), n_servers), dtype=int)
        for l, m in enumerate(hosts):
            A[l, m] = 1
        return A

    def server_load(self) -> Dict[int, float]:
        """Allocated remote clock per server in cycles/s"""
        load: Dict[int, float] = {}
        for key in self.offloaded_keys:
            for m, f in zip(self.hosts[key], self.remote_clocks[key]):
                load[m] = load.get(m, 0.0) + f
        return load

    def copy(self) -> "Assignment":
        return Assignment(
            offload=dict(self.offload),
            local_clocks=dict(self.local_clocks),
            hosts=dict(self.hosts),
            remote_clocks=dict(self.remote_clocks),
        )

    def to_dict(self) -> Dict[str, Any]:
        out = []
        for key in sorted(self.offload):
            d: Dict[str, Any] = {"key": str(key), "offload": bool(self.offload[key])}
            if key in self.local_clocks:
                d["local_clocks_hz"] = [float(f) for f in self.local_clocks[key]]
            if key in self.hosts:
                d["hosts"] = list(self.hosts[key])
                d["remote_clocks_hz"] = [float(f) for f in self.remote_clocks[key]]
            out.append(d)
        return {"requests": out}

    @staticmethod
    def from_dict(d: Dict[str, Any]) -> "Assignment":
        a = Assignment()
        for r in d["requests"]:
            key = RequestKey.from_string(r["key"])
            a.offload[key] = bool(r["offload"])
            if "local_clocks_hz" in r:
                a.local_clocks[key] = tuple(float(f) for f in r["local_clocks_hz"])
            if "hosts" in r:
                a.hosts[key] = tuple(int(h) for h in r["hosts"])
                a.remote_clocks[key] = tuple(float(f) for f in r["remote_clocks_hz"])
        return a


@dataclass
class TraceRecord:
    """One migration attempt"""

    iteration: int
    candidate: Optional[RequestKey]
    delta_z: float
    objective: float
    accepted: bool


@dataclass
class SolverTrace:
    """Intermediate quantities of a solve

    `objectives[0]` is the objective after the initial offloading step,
    followed by the objective after every accepted migration.
    """

    objectives: List[float] = field(default_factory=list)
    records: List[TraceRecord] = field(default_factory=list)
    delay_multipliers: Dict[RequestKey, float] = field(default_factory=dict)
    price_multipliers: Dict[RequestKey, float] = field(default_factory=dict)
    slack: Dict[RequestKey, Tuple[float, ...]] = field(default_factory=dict)
    free_capacity: Dict[int, float] = field(default_factory=dict)
    ranking: Dict[int, float] = field(default_factory=dict)
    unplaced: List[RequestKey] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    def is_non_increasing(self, tol: float = 0.0) -> bool:
        return all(b <= a + tol for a, b in zip(self.objectives[:-1], self.objectives[1:]))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "objectives": [float(v) for v in self.objectives],
            "records": [
                {
                    "iteration": r.iteration,
                    "candidate": None if r.candidate is None else str(r.candidate),
                    "delta_z": float(r.delta_z),
                    "objective": float(r.objective),
                    "accepted": r.accepted,
                }
                for r in self.records
            ],
            "unplaced": [str(k) for k in self.unplaced],
            "notes": list(self.notes),
        }


@dataclass
class SolutionReport:
    """Objective, cost breakdown and feasibility of a solution"""

    algorithm: str
    objective: float
    cost: SystemCost
    feasibility: Any
    infeasible_requests: List[RequestKey] = field(default_factory=list)
    n_offloaded: int = 0
    offloaded_bits: float = 0.0
    iterations: int = 0

    @property
    def feasible(self) -> bool:
        return bool(self.feasibility.ok)

    @property
    def mean_energy_j(self) -> float:
        return self.cost.mean_energy_j

    def to_dict(self) -> Dict[str, Any]:
        return {
            "algorithm": self.algorithm,
            "objective": float(self.objective),
            "feasible": self.feasible,
            "n_offloaded": int(self.n_offloaded),
            "offloaded_bits": float(self.offloaded_bits),
            "avg_energy_J": float(self.mean_energy_j),
            "iterations": int(self.iterations),
            "infeasible_requests": [str(k) for k in self.infeasible_requests],
            "constraints": self.feasibility.to_dict(),
        }

    def __repr__(self) -> str:
        status = "feasible" if self.feasible else "INFEASIBLE"
        return (
            f"<SolutionReport> {self.algorithm}: objective={self.objective:.6g}, "
            f"{self.n_offloaded} offloaded, {status}"
        )


def offloaded_bits(assignment: Assignment, scenario: Scenario) -> float:
    """Total input data of the offloaded requests"""
    total = 0.0
    for key in assignment.offloaded_keys:
        mu = scenario.mu(key.cell, key.mu)
        total += mu.requests[key.request].data_bits(mu.u_bits)
    return total


def save_solution(
    filename: Union[str, Path],
    assignment: Assignment,
    report: Optional[SolutionReport] = None,
    *,
    seed: Optional[int] = None,
) -> None:
    """Write an assignment (and its report) as YAML"""
    d: Dict[str, Any] = {"seed": seed}
    if report is not None:
        d["report"] = report.to_dict()
    d["assignment"] = assignment.to_dict()
    Path(filename).write_text(yaml.safe_dump(d, sort_keys=False), encoding="utf-8")


def load_solution(filename: Union[str, Path]) -> Assignment:
    """Assignment stored by `save_solution`"""
    with open(filename, encoding="utf-8") as f:
        d = yaml.safe_load(f)
    if not isinstance(d, dict) or "assignment" not in d:
        raise ValueError(f"{filename} does not contain an assignment")
    return Assignment.from_dict(d["assignment"])
