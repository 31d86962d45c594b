"""World description: servers, backhaul graph, cells, mobile users and their requests"""
from ._types import BackhaulGraph, Cell, MobileUser, ServiceRequest, Scenario
from ._topology import build_topology
from ._generate import ScenarioConfig, generate_scenario
from ._io import (
    scenario_to_dict,
    scenario_from_dict,
    dump_scenario,
    save_scenario,
    load_scenario,
)

__all__ = [
    "BackhaulGraph",
    "Cell",
    "MobileUser",
    "ServiceRequest",
    "Scenario",
    "build_topology",
    "ScenarioConfig",
    "generate_scenario",
    "scenario_to_dict",
    "scenario_from_dict",
    "dump_scenario",
    "save_scenario",
    "load_scenario",
]
