from __future__ import annotations
from pathlib import Path
from typing import Any, Dict, Union

import yaml

from .harness import SweepSpec
from .scenario import ScenarioConfig


def from_config(conf: Union[dict, str, Path]) -> Union[ScenarioConfig, SweepSpec]:
    """Load a scenario configuration or a sweep from a config file (or dict)

    A configuration with a `sweep` section is a sweep, anything else a
    scenario configuration.

    Parameters
    ----------
    conf : Union[str, Path, dict]
        path to config file or dict with configuration

    Returns
    -------
    ScenarioConfig or SweepSpec

    Examples
    --------
    >>> import mecsfc
    >>> config = mecsfc.from_config("scenario.yml")
    >>> spec = mecsfc.from_config("bandwidth_sweep.yml")
    """
    if isinstance(conf, (str, Path)):
        p = Path(conf)
        ext = p.suffix
        if (ext == ".yml") or (ext == ".yaml") or (ext == ".conf"):
            conf = _yaml_to_dict(p)
        else:
            raise ValueError("Filename extension not supported! Use .yml or .yaml")

    if not isinstance(conf, dict):
        raise TypeError(f"Configuration must be a mapping, not {type(conf).__name__}")
    if "sweep" in conf:
        return SweepSpec.from_dict(conf)
    return ScenarioConfig.from_dict(conf)


def scenario_config(conf: Union[dict, str, Path, None]) -> ScenarioConfig:
    """Scenario configuration from a file or dict, the defaults for None"""
    if conf is None:
        return ScenarioConfig()
    out = from_config(conf)
    if not isinstance(out, ScenarioConfig):
        raise ValueError("Expected a scenario configuration, got a sweep")
    return out


def sweep_spec(conf: Union[dict, str, Path]) -> SweepSpec:
    out = from_config(conf)
    if not isinstance(out, SweepSpec):
        raise ValueError("Expected a sweep configuration with a 'sweep' section")
    return out


def _yaml_to_dict(filename: Path) -> Dict[str, Any]:
    with open(filename, encoding="utf-8") as f:
        contents = f.read()
    conf = yaml.safe_load(contents)
    return conf or {}
