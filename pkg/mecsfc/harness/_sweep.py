from __future__ import annotations
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
import logging
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union
import warnings

import numpy as np
import pandas as pd

from ..scenario import ScenarioConfig, generate_scenario
from ..settings import get_option, is_positive_int, register_option
from ..types import Algorithm, TopologyKind

logger = logging.getLogger(__name__)

register_option(
    "harness.workers",
    1,
    "Number of worker processes of run_sweep, 1 runs in-process",
    validator=is_positive_int,
)

COLUMNS = [
    "param",
    "value",
    "algo",
    "topology",
    "seed",
    "objective",
    "avg_energy_J",
    "offloaded_bits",
    "feasible",
]
METRICS = ["objective", "avg_energy_J", "offloaded_bits"]
OUTPUTS = METRICS + ["constraints"]

# requested output name -> output
_OUTPUT_ALIASES = {
    "objective": "objective",
    "z": "objective",
    "avg_energy_j": "avg_energy_J",
    "energy": "avg_energy_J",
    "offloaded_bits": "offloaded_bits",
    "bits": "offloaded_bits",
    "constraints": "constraints",
    "slack": "constraints",
}

# swept parameter name -> ScenarioConfig field
_PARAMETERS = {
    "u_bits": "u_bits",
    "input_data_size": "u_bits",
    "bandwidth_hz": "bandwidth_hz",
    "bandwidth": "bandwidth_hz",
    "deadline_s": "deadline_s",
    "deadline": "deadline_s",
    "mus_per_cell": "mus_per_cell",
    "compute_budget_usd": "compute_budget_usd",
    "compute_budget": "compute_budget_usd",
    "topology": "topology",
    "theta_tx": "theta_tx",
    "theta_weights": "theta_tx",
}


def parameter_field(name: str) -> str:
    """Config field varied by sweep parameter `name`"""
    try:
        return _PARAMETERS[name.lower()]
    except KeyError as e:
        raise KeyError(
            f"Sweep parameter {name} not recognized. Available options: {sorted(set(_PARAMETERS))}"
        ) from e


def output_name(name: str) -> str:
    """Canonical name of sweep output `name`"""
    try:
        return _OUTPUT_ALIASES[name.lower()]
    except KeyError as e:
        raise KeyError(
            f"Sweep output {name} not recognized. Available options: {sorted(set(_OUTPUT_ALIASES))}"
        ) from e


def apply_parameter(config: ScenarioConfig, name: str, value: Any) -> ScenarioConfig:
    """Config with parameter `name` set to `value`

    Examples
    --------
    >>> apply_parameter(ScenarioConfig(), "theta_weights", 0.3).theta_cp
    0.7
    """
    key = parameter_field(name)
    if key == "theta_tx":
        return config.replace(theta_tx=float(value), theta_cp=1.0 - float(value))
    if key == "topology":
        kind = TopologyKind.from_string(value)
        n_core = config.n_core_servers
        if kind == TopologyKind.MESH_CENTER_CLOUD:
            n_core = max(n_core, 1)
        elif kind == TopologyKind.RING:
            n_core = 0
        return config.replace(topology=kind, n_core_servers=n_core)
    if key == "mus_per_cell":
        k = int(value)
        return config.replace(mus_per_cell=k, antennas=max(config.antennas, 8 * k))
    return config.replace(**{key: float(value)})


@dataclass
class SweepSpec:
    """Parameter sweep: every (value, algorithm, seed) combination is one solve

    Parameters
    ----------
    parameter : str
        swept parameter, one of u_bits (input_data_size), bandwidth_hz
        (bandwidth), deadline_s (deadline), mus_per_cell, compute_budget_usd
        (compute_budget), topology, theta_tx (theta_weights)
    values : Sequence
        parameter values
    algorithms : Sequence[Algorithm]
        algorithms to run
    seeds : Sequence[int]
        scenario seeds
    scenario : ScenarioConfig
        base configuration the parameter is applied to
    workers : int, optional
        worker processes, by default option `harness.workers`
    outputs : Sequence[str], optional
        metrics to record, any of objective, avg_energy_J (energy),
        offloaded_bits and constraints (slack); by default all of them.
        Metrics not requested are left missing.
    """

    parameter: str
    values: Sequence[Any]
    algorithms: Sequence[Algorithm] = (Algorithm.GTDA,)
    seeds: Sequence[int] = (1,)
    scenario: ScenarioConfig = field(default_factory=ScenarioConfig)
    workers: Optional[int] = None
    outputs: Sequence[str] = tuple(OUTPUTS)

    def __post_init__(self) -> None:
        parameter_field(self.parameter)
        self.parameter = self.parameter.lower()
        if len(self.values) == 0:
            raise ValueError("Sweep needs at least one parameter value")
        if len(self.seeds) == 0:
            raise ValueError("Sweep needs at least one seed")
        self.values = list(self.values)
        self.seeds = [int(s) for s in self.seeds]
        self.algorithms = [Algorithm.from_string(a) for a in self.algorithms]
        if len(self.algorithms) == 0:
            raise ValueError("Sweep needs at least one algorithm")
        if self.workers is not None:
            is_positive_int(self.workers)
        if isinstance(self.outputs, str):
            self.outputs = [self.outputs]
        requested = {output_name(o) for o in self.outputs}
        if not requested:
            raise ValueError("Sweep needs at least one output")
        self.outputs = [o for o in OUTPUTS if o in requested]

    @staticmethod
    def from_dict(d: Mapping[str, Any]) -> "SweepSpec":
        """Spec from a sweep file: a `sweep` section and an optional `scenario` section

        Examples
        --------
        >>> spec = SweepSpec.from_dict({"sweep": {"parameter": "bandwidth", "values": [1e5, 5e5], "seeds": 3}})
        >>> spec.seeds
        [1, 2, 3]
        """
        d = dict(d)
        sweep = dict(d.pop("sweep"))
        scenario = ScenarioConfig.from_dict(d.pop("scenario", None) or {})
        if d:
            raise KeyError(f"Unknown sweep file keys: {sorted(d)}")
        seeds = sweep.pop("seeds", [1])
        if isinstance(seeds, int):
            seeds = list(range(1, seeds + 1))
        unknown = set(sweep) - {"parameter", "values", "algorithms", "workers", "outputs"}
        if unknown:
            raise KeyError(f"Unknown keys in 'sweep': {sorted(unknown)}")
        return SweepSpec(
            parameter=sweep["parameter"],
            values=sweep["values"],
            algorithms=sweep.get("algorithms", ["gtda"]),
            seeds=seeds,
            scenario=scenario,
            workers=sweep.get("workers"),
            outputs=sweep.get("outputs", OUTPUTS),
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "sweep": {
                "parameter": self.parameter,
                "values": [v if isinstance(v, str) else float(v) for v in self.values],
                "algorithms": [str(a) for a in self.algorithms],
                "seeds": list(self.seeds),
                "workers": self.workers,
                "outputs": list(self.outputs),
            },
            "scenario": self.scenario.to_dict(),
        }

    def cells(self) -> List[Tuple[int, Any, Algorithm, int]]:
        """(value index, value, algorithm, seed) in canonical order"""
        return [
            (i, v, a, s)
            for i, v in enumerate(self.values)
            for a in self.algorithms
            for s in self.seeds
        ]


def _run_cell(
    spec: SweepSpec, cell: Tuple[int, Any, Algorithm, int]
) -> Tuple[Dict[str, Any], Dict[str, float], Optional[str]]:
    from .. import solve

    _, value, algo, seed = cell
    row: Dict[str, Any] = {
        "param": spec.parameter,
        "value": value,
        "algo": str(algo),
        "topology": "",
        "seed": seed,
        "objective": np.nan,
        "avg_energy_J": np.nan,
        "offloaded_bits": np.nan,
        "feasible": False,
    }
    try:
        config = apply_parameter(spec.scenario, spec.parameter, value)
        row["topology"] = str(config.topology)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            scenario = generate_scenario(config, seed)
            _, report = solve(scenario, algo)
    except Exception as err:  # failed cells become rows
        logger.warning("sweep cell %s=%s %s seed %d failed: %s", spec.parameter, value, algo, seed, err)
        return row, {}, f"{type(err).__name__}: {err}"

    metrics = {
        "objective": report.objective,
        "avg_energy_J": report.mean_energy_j,
        "offloaded_bits": report.offloaded_bits,
    }
    for name in METRICS:
        if name in spec.outputs:
            row[name] = metrics[name]
    row["feasible"] = report.feasible
    worst: Dict[str, float] = {}
    if "constraints" in spec.outputs:
        worst = {name: c.worst for name, c in report.feasibility.checks.items()}
    return row, worst, None


def run_sweep(spec: SweepSpec, workers: Optional[int] = None) -> "SweepResult":
    """Solve every (value, algorithm, seed) cell of a sweep

    Rows come in canonical order (value, algorithm, seed) regardless of the
    number of workers. A cell whose solve raises is kept as a row with
    missing metrics and `feasible=False`, and listed in `failures`.

    Parameters
    ----------
    spec : SweepSpec
    workers : int, optional
        overrides `spec.workers` and option `harness.workers`

    Returns
    -------
    SweepResult
    """
    from ._results import SweepResult

    workers = workers or spec.workers or get_option("harness.workers")
    cells = spec.cells()
    logger.info("sweep over %s: %d cells, %d worker(s)", spec.parameter, len(cells), workers)

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_run_cell, [spec] * len(cells), cells))
    else:
        outcomes = [_run_cell(spec, c) for c in cells]

    rows, constraints, failures = [], [], []
    for cell, (row, worst, error) in zip(cells, outcomes):
        rows.append(row)
        constraints.append(worst)
        if error is not None:
            failures.append({"value": cell[1], "algo": str(cell[2]), "seed": cell[3], "error": error})

    data = pd.DataFrame(rows, columns=COLUMNS)
    return SweepResult(
        data=data,
        constraints=pd.DataFrame(constraints, index=data.index),
        failures=failures,
        spec=spec,
    )
