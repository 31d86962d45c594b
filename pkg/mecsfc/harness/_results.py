from __future__ import annotations
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import pandas as pd
import yaml

from ._sweep import COLUMNS, METRICS, SweepSpec


@dataclass
class SweepResult:
    """Rows of a sweep

    Attributes
    ----------
    data : pd.DataFrame
        one row per (value, algorithm, seed) with the columns of the CSV
    constraints : pd.DataFrame
        worst violation per constraint family, aligned with `data`
    failures : List[dict]
        cells whose solve raised
    spec : SweepSpec, optional
        the sweep that produced the rows
    """

    data: pd.DataFrame
    constraints: pd.DataFrame = field(default_factory=pd.DataFrame)
    failures: List[Dict[str, Any]] = field(default_factory=list)
    spec: Optional[SweepSpec] = None

    def __len__(self) -> int:
        return len(self.data)

    @property
    def summary(self) -> pd.DataFrame:
        """Mean and standard deviation of every metric per (value, algorithm)"""
        return self.data.groupby(["value", "algo"], sort=False)[METRICS].agg(["mean", "std"])

    @property
    def aggregates(self) -> pd.DataFrame:
        """One row per (value, algorithm): `<metric>_mean`, `<metric>_std`, `n` and `n_feasible`

        Examples
        --------
        >>> spec = SweepSpec(parameter="u_bits", values=[0.4e6, 0.8e6, 1.2e6], seeds=range(1, 11))
        >>> result = run_sweep(spec)
        >>> len(result), len(result.aggregates)
        (30, 3)
        """
        grouped = self.data.groupby(["param", "value", "algo"], sort=False)
        out = grouped[METRICS].agg(["mean", "std"])
        out.columns = [f"{metric}_{stat}" for metric, stat in out.columns]
        out["n"] = grouped.size()
        out["n_feasible"] = grouped["feasible"].sum().astype(int)
        return out.reset_index()

    def __repr__(self) -> str:
        param = self.data["param"].iloc[0] if len(self.data) else "?"
        return f"<SweepResult> {param}: {len(self.data)} rows, {len(self.failures)} failures"


def emit_results(result: SweepResult, filename: Union[str, Path]) -> Path:
    """Write the rows as CSV, the aggregates as `<stem>.summary.csv` and a `<stem>.meta.yml` sidecar

    The CSV holds exactly the columns
    param,value,algo,topology,seed,objective,avg_energy_J,offloaded_bits,feasible.
    The summary holds one row per (value, algorithm), see
    `SweepResult.aggregates`. The sidecar records the sweep definition, the
    package version and the failed cells.

    Returns
    -------
    Path
        path of the sidecar file
    """
    from .. import __version__

    if len(result.data) == 0:
        raise ValueError("Cannot emit an empty result table")
    path = Path(filename)
    result.data[COLUMNS].to_csv(path, index=False, lineterminator="\n")
    result.aggregates.to_csv(
        path.with_name(path.stem + ".summary.csv"), index=False, lineterminator="\n"
    )

    meta = {
        "version": __version__,
        "rows": len(result.data),
        "sweep": None if result.spec is None else result.spec.to_dict(),
        "failures": [{k: (v if isinstance(v, (int, str)) else float(v)) for k, v in f.items()} for f in result.failures],
    }
    meta_path = path.with_name(path.stem + ".meta.yml")
    meta_path.write_text(yaml.safe_dump(meta, sort_keys=False), encoding="utf-8")
    return meta_path


def read_results(filename: Union[str, Path]) -> SweepResult:
    """Rows written by `emit_results`"""
    path = Path(filename)
    df = pd.read_csv(path, dtype={"param": str, "algo": str, "topology": str, "value": str})
    df["topology"] = df["topology"].fillna("")
    if len(df) and df["param"].iloc[0] != "topology":
        df["value"] = pd.to_numeric(df["value"])
    df["feasible"] = df["feasible"].astype(bool)

    failures: List[Dict[str, Any]] = []
    meta_path = path.with_name(path.stem + ".meta.yml")
    if meta_path.exists():
        with open(meta_path, encoding="utf-8") as f:
            failures = (yaml.safe_load(f) or {}).get("failures", [])
    return SweepResult(data=df[COLUMNS], failures=failures)
