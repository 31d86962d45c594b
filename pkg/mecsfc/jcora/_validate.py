from __future__ import annotations
from dataclasses import dataclass, field
from typing import Any, Dict, List

import numpy as np
import pandas as pd

from ..costs import local_exec, offload_quote
from ..scenario import Scenario
from ..settings import get_option, is_positive, register_option
from ..types import InfeasibleError, RequestKey
from ._assignment import Assignment

register_option(
    "validate.delay_tol",
    1e-9,
    "Absolute tolerance in seconds on deadlines",
    validator=is_positive,
)
register_option(
    "validate.capacity_rtol",
    1e-9,
    "Relative tolerance on MU and server clock capacities",
    validator=is_positive,
)

CONSTRAINTS = (
    "binary_decisions",
    "positive_clocks",
    "local_capacity",
    "deadline",
    "single_placement",
    "function_library",
    "chain_adjacency",
    "server_capacity",
)


@dataclass
class ConstraintCheck:
    """Outcome of one constraint family; `worst` is the largest violation (0 if none)"""

    name: str
    worst: float = 0.0
    n_violations: int = 0
    offenders: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.n_violations == 0

    def flag(self, amount: float, offender: Any) -> None:
        self.n_violations += 1
        self.worst = max(self.worst, float(amount))
        self.offenders.append(str(offender))


@dataclass
class FeasibilityReport:
    """Per-constraint pass/fail of an assignment"""

    checks: Dict[str, ConstraintCheck]

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks.values())

    @property
    def violated(self) -> List[str]:
        return [name for name, c in self.checks.items() if not c.passed]

    def __getitem__(self, name: str) -> ConstraintCheck:
        return self.checks[name]

    def to_dict(self) -> Dict[str, Any]:
        return {
            name: {"passed": c.passed, "worst": float(c.worst), "n_violations": c.n_violations}
            for name, c in self.checks.items()
        }

    def to_dataframe(self) -> pd.DataFrame:
        return pd.DataFrame(
            [
                {"constraint": n, "passed": c.passed, "worst": c.worst, "n_violations": c.n_violations}
                for n, c in self.checks.items()
            ]
        ).set_index("constraint")

    def __repr__(self) -> str:
        if self.ok:
            return "<FeasibilityReport> all constraints satisfied"
        return f"<FeasibilityReport> violated: {', '.join(self.violated)}"


def validate(assignment: Assignment, scenario: Scenario) -> FeasibilityReport:
    """Check an assignment against every constraint of the offloading problem

    Delays are recomputed from scratch. Capacity violations are reported
    relative to the capacity, deadline violations in seconds, the remaining
    constraints as counts.

    Tolerances are the options `validate.delay_tol` and `validate.capacity_rtol`.
    """
    delay_tol = get_option("validate.delay_tol")
    rtol = get_option("validate.capacity_rtol")
    checks = {name: ConstraintCheck(name) for name in CONSTRAINTS}
    graph = scenario.graph
    server_load: Dict[int, float] = {}

    for mu in scenario.mus:
        local_load = 0.0
        for r in mu.requests:
            key = RequestKey(mu.cell, mu.index, r.id)
            if not assignment.is_complete_for(key):
                checks["binary_decisions"].flag(1.0, key)
                continue

            if not assignment.is_offloaded(key):
                f = np.asarray(assignment.local_clocks[key], dtype=float)
                try:
                    q = local_exec(mu, r, f)
                except ValueError:
                    checks["positive_clocks"].flag(1.0, key)
                    continue
                local_load += float(f.sum())
                if q.delay_s > mu.deadline_s + delay_tol:
                    checks["deadline"].flag(q.delay_s - mu.deadline_s, key)
                continue

            hosts = assignment.hosts[key]
            clocks = assignment.remote_clocks[key]
            if len(hosts) != len(r) or len(clocks) != len(r) or any(h not in graph.capacity for h in hosts):
                checks["single_placement"].flag(1.0, key)
                continue
            for h, fn in zip(hosts, r.chain):
                if not graph.supports(h, fn):
                    checks["function_library"].flag(1.0, key)
            for h, f in zip(hosts, clocks):
                server_load[h] = server_load.get(h, 0.0) + float(f)
            try:
                q = offload_quote(scenario, mu, r, hosts, clocks)
            except InfeasibleError:
                checks["chain_adjacency"].flag(1.0, key)
                continue
            except ValueError:
                checks["positive_clocks"].flag(1.0, key)
                continue
            if q.delay_s > mu.deadline_s + delay_tol:
                checks["deadline"].flag(q.delay_s - mu.deadline_s, key)

        if local_load > mu.max_clock_hz * (1 + rtol):
            checks["local_capacity"].flag(local_load / mu.max_clock_hz - 1, f"{mu.cell}/{mu.index}")

    for m, load in sorted(server_load.items()):
        if load > graph.capacity[m] * (1 + rtol):
            checks["server_capacity"].flag(load / graph.capacity[m] - 1, m)

    return FeasibilityReport(checks)
