from __future__ import annotations
from dataclasses import dataclass, field, fields, replace
import logging
import math
from typing import Any, Dict, Mapping, Optional, Tuple
import zlib

import numpy as np

from ..types import TopologyKind
from ._topology import GHZ, build_topology
from ._types import Cell, MobileUser, Scenario, ServiceRequest

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ScenarioConfig:
    """Parameters of a random scenario; defaults give four cells of eight MUs with five requests each

    See `ScenarioConfig.from_dict` for the nested YAML key tree.
    """

    seed: int = 1
    # backhaul
    topology: TopologyKind = TopologyKind.FULL_MESH
    n_core_servers: int = 0
    setup_delay_s: float = 0.010
    edge_capacities_ghz: Tuple[float, ...] = (1.7, 3.6, 3.8, 4.5)
    core_capacities_ghz: Tuple[float, ...] = (4.5,)
    blacklist: Mapping[int, Tuple[int, ...]] = field(default_factory=dict)
    # cells
    n_cells: int = 4
    spacing_m: float = 1600.0
    antennas: int = 64
    bandwidth_hz: float = 300e3
    mu_distance_m: Tuple[float, float] = (100.0, 800.0)
    # users and requests
    mus_per_cell: int = 8
    requests_per_mu: int = 5
    chain_length: Tuple[int, int] = (1, 2)
    n_function_types: int = 4
    u_bits: float = 0.8e6
    deadline_s: float = 0.8
    clock_choices_ghz: Tuple[float, ...] = (0.5, 0.6, 0.7, 0.8)
    kappa: float = 1e-26
    tx_power_w: float = 0.1
    cycles_per_bit: Tuple[float, float] = (200.0, 500.0)
    output_ratio: Tuple[float, float] = (0.5, 1.0)
    zeta: Optional[Tuple[float, ...]] = None
    energy_budget_j: float = 0.1
    compute_budget_usd: float = 0.035
    # pricing and weights
    eta: float = 1.0
    vartheta: float = 2.5e-12
    theta_tx: float = 0.8
    theta_cp: float = 0.2
    pathloss_exponent: float = 3.8
    slave_weight: float = 1.0

    def __post_init__(self) -> None:
        if isinstance(self.topology, str):
            object.__setattr__(self, "topology", TopologyKind.from_string(self.topology))
        positive = (
            "setup_delay_s", "n_cells", "spacing_m", "antennas", "bandwidth_hz",
            "mus_per_cell", "n_function_types", "deadline_s", "energy_budget_j",
            "compute_budget_usd", "pathloss_exponent",
        )
        for name in positive:
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)}")
        if self.requests_per_mu < 0 or self.u_bits < 0:
            raise ValueError("requests_per_mu and u_bits must be >= 0")
        lo, hi = self.mu_distance_m
        if not 0 < lo <= hi:
            raise ValueError(f"mu_distance_m must satisfy 0 < min <= max, got {self.mu_distance_m}")
        lo, hi = self.chain_length
        if not 1 <= lo <= hi <= self.n_function_types:
            raise ValueError(
                f"chain_length must satisfy 1 <= min <= max <= n_function_types, got {self.chain_length}"
            )
        lo, hi = self.cycles_per_bit
        if not 0 < lo <= hi:
            raise ValueError(f"cycles_per_bit must satisfy 0 < min <= max, got {self.cycles_per_bit}")
        lo, hi = self.output_ratio
        if not 0 < lo <= hi:
            raise ValueError(f"output_ratio must satisfy 0 < min <= max, got {self.output_ratio}")
        if self.zeta is not None:
            if len(self.zeta) != self.requests_per_mu:
                raise ValueError(
                    f"zeta has {len(self.zeta)} entries, expected requests_per_mu={self.requests_per_mu}"
                )
            if min(self.zeta, default=0) < 0 or sum(self.zeta) > 1 + 1e-12:
                raise ValueError(f"zeta must be >= 0 and sum to <= 1, got sum {sum(self.zeta)}")
        if not self.clock_choices_ghz or min(self.clock_choices_ghz) <= 0:
            raise ValueError("clock_choices_ghz must be non-empty and positive")

    def replace(self, **kwargs: Any) -> "ScenarioConfig":
        return replace(self, **kwargs)

    @staticmethod
    def from_dict(d: Mapping[str, Any]) -> "ScenarioConfig":
        """Config from the nested key tree of a scenario file

        Examples
        --------
        >>> ScenarioConfig.from_dict({"mus_per_cell": 2, "topology": {"kind": "ring"}}).mus_per_cell
        2
        """
        d = dict(d)
        if isinstance(d.get("topology"), (str, TopologyKind)):
            d["topology"] = {"kind": d["topology"]}
        kw: Dict[str, Any] = {}

        def take(section: str, mapping: Dict[str, str]) -> None:
            sub = d.pop(section, None) or {}
            if not isinstance(sub, Mapping):
                raise ValueError(f"'{section}' must be a mapping, got {sub!r}")
            unknown = set(sub) - set(mapping)
            if unknown:
                raise KeyError(f"Unknown keys in '{section}': {sorted(unknown)}")
            for k, v in sub.items():
                kw[mapping[k]] = v

        take(
            "topology",
            {
                "kind": "topology",
                "n_core_servers": "n_core_servers",
                "setup_delay_s": "setup_delay_s",
                "edge_capacities_ghz": "edge_capacities_ghz",
                "core_capacities_ghz": "core_capacities_ghz",
                "blacklist": "blacklist",
            },
        )
        take(
            "cells",
            {
                "count": "n_cells",
                "spacing_m": "spacing_m",
                "antennas": "antennas",
                "bandwidth_hz": "bandwidth_hz",
                "mu_distance_m": "mu_distance_m",
            },
        )
        take("mu", {"clock_choices_ghz": "clock_choices_ghz", "kappa": "kappa", "tx_power_w": "tx_power_w"})
        take("budgets", {"energy_j": "energy_budget_j", "compute_usd": "compute_budget_usd"})
        take("price", {"eta": "eta", "vartheta": "vartheta"})
        take("weights", {"theta_tx": "theta_tx", "theta_cp": "theta_cp"})

        flat = {f.name for f in fields(ScenarioConfig)}
        for k, v in d.items():
            if k not in flat:
                raise KeyError(f"Unknown scenario config key '{k}'")
            kw[k] = v

        tuples = (
            "edge_capacities_ghz", "core_capacities_ghz", "mu_distance_m", "chain_length",
            "clock_choices_ghz", "cycles_per_bit", "output_ratio", "zeta",
        )
        for k in tuples:
            if kw.get(k) is not None:
                kw[k] = tuple(kw[k])
        if "blacklist" in kw:
            kw["blacklist"] = {int(s): tuple(int(f) for f in fs) for s, fs in (kw["blacklist"] or {}).items()}
        return ScenarioConfig(**kw)

    def to_dict(self) -> Dict[str, Any]:
        """Nested key tree, the inverse of `from_dict`"""
        return {
            "seed": self.seed,
            "topology": {
                "kind": str(self.topology),
                "n_core_servers": self.n_core_servers,
                "setup_delay_s": self.setup_delay_s,
                "edge_capacities_ghz": list(self.edge_capacities_ghz),
                "core_capacities_ghz": list(self.core_capacities_ghz),
                "blacklist": {int(s): list(fs) for s, fs in self.blacklist.items()},
            },
            "cells": {
                "count": self.n_cells,
                "spacing_m": self.spacing_m,
                "antennas": self.antennas,
                "bandwidth_hz": self.bandwidth_hz,
                "mu_distance_m": list(self.mu_distance_m),
            },
            "mus_per_cell": self.mus_per_cell,
            "requests_per_mu": self.requests_per_mu,
            "chain_length": list(self.chain_length),
            "n_function_types": self.n_function_types,
            "u_bits": self.u_bits,
            "deadline_s": self.deadline_s,
            "mu": {
                "clock_choices_ghz": list(self.clock_choices_ghz),
                "kappa": self.kappa,
                "tx_power_w": self.tx_power_w,
            },
            "cycles_per_bit": list(self.cycles_per_bit),
            "output_ratio": list(self.output_ratio),
            "zeta": None if self.zeta is None else list(self.zeta),
            "budgets": {"energy_j": self.energy_budget_j, "compute_usd": self.compute_budget_usd},
            "price": {"eta": self.eta, "vartheta": self.vartheta},
            "weights": {"theta_tx": self.theta_tx, "theta_cp": self.theta_cp},
            "pathloss_exponent": self.pathloss_exponent,
            "slave_weight": self.slave_weight,
        }


def _stream(seed: int, name: str) -> np.random.Generator:
    """Independent generator for one named kind of draw"""
    ss = np.random.SeedSequence(entropy=seed % 2**64, spawn_key=(zlib.crc32(name.encode()),))
    return np.random.default_rng(ss)


def _bs_positions(n_cells: int, spacing: float) -> list:
    cols = math.ceil(math.sqrt(n_cells))
    return [(float((i % cols) * spacing), float((i // cols) * spacing)) for i in range(n_cells)]


def generate_scenario(config: Optional[ScenarioConfig] = None, seed: Optional[int] = None) -> Scenario:
    """Random scenario, deterministic for a given (config, seed)

    Base stations sit on a square grid. MUs are placed uniformly over the
    annulus `mu_distance_m` around their base station. Every kind of random
    draw uses its own named substream, so changing one kind of draw leaves
    the others unchanged.

    Parameters
    ----------
    config : ScenarioConfig, optional
        parameters, by default ScenarioConfig()
    seed : int, optional
        overrides `config.seed`

    Returns
    -------
    Scenario

    Examples
    --------
    >>> s = generate_scenario(seed=1)
    >>> len(s.cells), len(s.mus), s.n_requests
    (4, 32, 160)
    """
    config = config or ScenarioConfig()
    seed = config.seed if seed is None else seed

    graph = build_topology(
        config.topology,
        config.n_cells,
        config.n_core_servers,
        config.setup_delay_s,
        edge_capacities_ghz=config.edge_capacities_ghz,
        core_capacities_ghz=config.core_capacities_ghz,
        n_functions=config.n_function_types,
        blacklist=config.blacklist,
    )

    bs_pos = _bs_positions(config.n_cells, config.spacing_m)
    cells = tuple(
        Cell(
            bs_id=s,
            position=bs_pos[s],
            antennas=config.antennas,
            bandwidth_hz=float(config.bandwidth_hz),
            n_mus=config.mus_per_cell,
        )
        for s in range(config.n_cells)
    )

    n_mu = config.n_cells * config.mus_per_cell
    n_req = n_mu * config.requests_per_mu
    lo, hi = config.mu_distance_m
    radius = np.sqrt(_stream(seed, "mu_radius").uniform(lo**2, hi**2, size=n_mu))
    angle = _stream(seed, "mu_angle").uniform(0.0, 2 * np.pi, size=n_mu)
    clocks = _stream(seed, "mu_clock").choice(np.asarray(config.clock_choices_ghz) * GHZ, size=n_mu)

    rng_len = _stream(seed, "chain_length")
    rng_fn = _stream(seed, "chain_functions")
    rng_c = _stream(seed, "cycles_per_bit")
    rng_xi = _stream(seed, "output_ratio")
    lengths = rng_len.integers(config.chain_length[0], config.chain_length[1] + 1, size=n_req)

    if config.zeta is None:
        n = config.requests_per_mu
        zeta = [1.0 / n] * n if n else []
    else:
        zeta = [float(z) for z in config.zeta]

    mus = []
    j = 0
    for s in range(config.n_cells):
        for k in range(config.mus_per_cell):
            i = s * config.mus_per_cell + k
            x0, y0 = bs_pos[s]
            position = (
                float(x0 + radius[i] * np.cos(angle[i])),
                float(y0 + radius[i] * np.sin(angle[i])),
            )
            requests = []
            for r in range(config.requests_per_mu):
                n_fn = int(lengths[j])
                j += 1
                chain = tuple(int(f) for f in rng_fn.choice(config.n_function_types, size=n_fn, replace=False))
                cpb = tuple(float(c) for c in rng_c.uniform(*config.cycles_per_bit, size=n_fn))
                ratios = rng_xi.uniform(*config.output_ratio, size=n_fn)
                xi = tuple(float(v) for v in np.concatenate([[1.0], np.cumprod(ratios[:-1])]))
                requests.append(
                    ServiceRequest(id=r, zeta=zeta[r], chain=chain, xi=xi, cycles_per_bit=cpb)
                )
            mus.append(
                MobileUser(
                    cell=s,
                    index=k,
                    position=position,
                    max_clock_hz=float(clocks[i]),
                    kappa=config.kappa,
                    u_bits=float(config.u_bits),
                    deadline_s=float(config.deadline_s),
                    energy_budget_j=float(config.energy_budget_j),
                    compute_budget_usd=float(config.compute_budget_usd),
                    tx_power_w=float(config.tx_power_w),
                    requests=tuple(requests),
                    slave_weight=float(config.slave_weight),
                )
            )

    scenario = Scenario(
        graph=graph,
        cells=cells,
        mus=tuple(mus),
        pathloss_exponent=float(config.pathloss_exponent),
        theta_tx=float(config.theta_tx),
        theta_cp=float(config.theta_cp),
        eta=float(config.eta),
        vartheta=float(config.vartheta),
        seed=int(seed),
    )
    logger.debug("generated %r with seed %d", scenario, seed)
    return scenario
