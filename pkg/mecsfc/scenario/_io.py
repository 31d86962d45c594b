from __future__ import annotations
from pathlib import Path
from typing import Any, Dict, Union

import yaml

from ..types import TopologyKind
from ._types import BackhaulGraph, Cell, MobileUser, Scenario, ServiceRequest

SNAPSHOT_VERSION = 1


def _graph_to_dict(g: BackhaulGraph) -> Dict[str, Any]:
    return {
        "kind": None if g.kind is None else str(g.kind),
        "nodes": list(g.nodes),
        "edge_servers": sorted(g.edge_servers),
        "capacity_hz": {v: float(g.capacity[v]) for v in g.nodes},
        "library": {v: sorted(g.library[v]) for v in g.nodes},
        "edges": [[x, y, float(d)] for (x, y), d in sorted(g.edges.items())],
    }


def _graph_from_dict(d: Dict[str, Any]) -> BackhaulGraph:
    return BackhaulGraph(
        nodes=tuple(int(v) for v in d["nodes"]),
        edges={(int(x), int(y)): float(delay) for x, y, delay in d["edges"]},
        edge_servers=frozenset(int(v) for v in d["edge_servers"]),
        capacity={int(v): float(c) for v, c in d["capacity_hz"].items()},
        library={int(v): frozenset(int(f) for f in fs) for v, fs in d["library"].items()},
        kind=None if d.get("kind") is None else TopologyKind.from_string(d["kind"]),
    )


def _request_to_dict(r: ServiceRequest) -> Dict[str, Any]:
    return {
        "id": r.id,
        "zeta": float(r.zeta),
        "chain": list(r.chain),
        "xi": [float(v) for v in r.xi],
        "cycles_per_bit": [float(v) for v in r.cycles_per_bit],
    }


def _mu_to_dict(mu: MobileUser) -> Dict[str, Any]:
    return {
        "cell": mu.cell,
        "index": mu.index,
        "position": [float(v) for v in mu.position],
        "max_clock_hz": float(mu.max_clock_hz),
        "kappa": float(mu.kappa),
        "u_bits": float(mu.u_bits),
        "deadline_s": float(mu.deadline_s),
        "energy_budget_j": float(mu.energy_budget_j),
        "compute_budget_usd": float(mu.compute_budget_usd),
        "tx_power_w": float(mu.tx_power_w),
        "slave_weight": float(mu.slave_weight),
        "requests": [_request_to_dict(r) for r in mu.requests],
    }


def _mu_from_dict(d: Dict[str, Any]) -> MobileUser:
    d = dict(d)
    requests = tuple(
        ServiceRequest(
            id=int(r["id"]),
            zeta=float(r["zeta"]),
            chain=tuple(int(f) for f in r["chain"]),
            xi=tuple(float(v) for v in r["xi"]),
            cycles_per_bit=tuple(float(v) for v in r["cycles_per_bit"]),
        )
        for r in d.pop("requests")
    )
    position = tuple(float(v) for v in d.pop("position"))
    return MobileUser(requests=requests, position=position, **d)  # type: ignore[arg-type]


def scenario_to_dict(s: Scenario) -> Dict[str, Any]:
    """Plain-python representation with a fixed key order"""
    return {
        "version": SNAPSHOT_VERSION,
        "seed": s.seed,
        "pathloss_exponent": float(s.pathloss_exponent),
        "theta_tx": float(s.theta_tx),
        "theta_cp": float(s.theta_cp),
        "eta": float(s.eta),
        "vartheta": float(s.vartheta),
        "graph": _graph_to_dict(s.graph),
        "cells": [
            {
                "bs_id": c.bs_id,
                "position": [float(v) for v in c.position],
                "antennas": c.antennas,
                "bandwidth_hz": float(c.bandwidth_hz),
                "n_mus": c.n_mus,
            }
            for c in s.cells
        ],
        "mus": [_mu_to_dict(mu) for mu in s.mus],
    }


def scenario_from_dict(d: Dict[str, Any]) -> Scenario:
    version = d.get("version", SNAPSHOT_VERSION)
    if version != SNAPSHOT_VERSION:
        raise ValueError(f"Unsupported scenario snapshot version {version}")
    cells = tuple(
        Cell(
            bs_id=int(c["bs_id"]),
            position=tuple(float(v) for v in c["position"]),  # type: ignore[arg-type]
            antennas=int(c["antennas"]),
            bandwidth_hz=float(c["bandwidth_hz"]),
            n_mus=int(c["n_mus"]),
        )
        for c in d["cells"]
    )
    return Scenario(
        graph=_graph_from_dict(d["graph"]),
        cells=cells,
        mus=tuple(_mu_from_dict(m) for m in d["mus"]),
        pathloss_exponent=float(d["pathloss_exponent"]),
        theta_tx=float(d["theta_tx"]),
        theta_cp=float(d["theta_cp"]),
        eta=float(d["eta"]),
        vartheta=float(d["vartheta"]),
        seed=d.get("seed"),
    )


def dump_scenario(s: Scenario) -> str:
    """Canonical YAML snapshot, identical text for equal scenarios"""
    return yaml.safe_dump(scenario_to_dict(s), sort_keys=False, default_flow_style=None)


def save_scenario(s: Scenario, filename: Union[str, Path]) -> None:
    Path(filename).write_text(dump_scenario(s), encoding="utf-8")


def load_scenario(filename: Union[str, Path]) -> Scenario:
    with open(filename, encoding="utf-8") as f:
        return scenario_from_dict(yaml.safe_load(f))
