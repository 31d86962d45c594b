"""Command line entry point `mec-sfc`

    mec-sfc solve --config scenario.yml --seed 1 --algo gtda --out run/
    mec-sfc sweep --spec bandwidth_sweep.yml --out run/
    mec-sfc validate --solution run/solution.yml --config scenario.yml

Exit code 0 on success, 2 if the solution violates a constraint, 1 on error.
"""
from __future__ import annotations
import argparse
import logging
from pathlib import Path
import sys
from typing import List, Optional

import yaml

from . import __version__, solve
from .configuration import scenario_config, sweep_spec
from .harness import emit_results, run_sweep
from .jcora import load_solution, save_solution, validate
from .scenario import generate_scenario, save_scenario
from .settings import load_profile
from .types import Algorithm

logger = logging.getLogger("mecsfc")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INFEASIBLE = 2


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mec-sfc",
        description="Joint computation offloading, service-function placement and clock allocation",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "-log",
        "--loglevel",
        default="warning",
        choices=["debug", "info", "warning", "error"],
        help="logging level, by default warning",
    )
    parser.add_argument("--profile", default=None, help="option profile to load, e.g. fast or strict")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve one seeded scenario")
    p.add_argument("--config", default=None, help="scenario configuration (.yml), defaults if omitted")
    p.add_argument("--seed", type=int, default=None, help="scenario seed, overrides the config")
    p.add_argument("--algo", default="gtda", choices=[str(a) for a in Algorithm])
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("sweep", help="run a parameter sweep")
    p.add_argument("--spec", required=True, help="sweep file (.yml) with a 'sweep' section")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--workers", type=int, default=None, help="worker processes")

    p = sub.add_parser("validate", help="check a stored solution against its scenario")
    p.add_argument("--solution", required=True, help="solution file written by 'solve'")
    p.add_argument("--config", default=None, help="scenario configuration the solution was computed for")
    p.add_argument("--seed", type=int, default=None, help="scenario seed, by default the one stored with the solution")
    return parser


def _solve(args: argparse.Namespace) -> int:
    config = scenario_config(args.config)
    seed = config.seed if args.seed is None else args.seed
    scenario = generate_scenario(config, seed)
    assignment, report = solve(scenario, args.algo)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    save_solution(out / "solution.yml", assignment, report, seed=seed)
    save_scenario(scenario, out / "scenario.yml")
    print(report)
    if not report.feasible:
        logger.warning("violated constraints: %s", ", ".join(report.feasibility.violated))
        return EXIT_INFEASIBLE
    return EXIT_OK


def _sweep(args: argparse.Namespace) -> int:
    spec = sweep_spec(args.spec)
    result = run_sweep(spec, workers=args.workers)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    emit_results(result, out / f"{Path(args.spec).stem}.csv")
    print(result)
    return EXIT_OK


def _validate(args: argparse.Namespace) -> int:
    with open(args.solution, encoding="utf-8") as f:
        stored = yaml.safe_load(f) or {}
    config = scenario_config(args.config)
    seed = args.seed if args.seed is not None else stored.get("seed", config.seed)
    scenario = generate_scenario(config, seed)
    report = validate(load_solution(args.solution), scenario)
    print(report)
    return EXIT_OK if report.ok else EXIT_INFEASIBLE


_COMMANDS = {"solve": _solve, "sweep": _sweep, "validate": _validate}


def main(argv: Optional[List[str]] = None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(
        level=args.loglevel.upper(),
        format="%(asctime)s mec-sfc %(levelname)s %(message)s",
    )
    try:
        if args.profile:
            load_profile(args.profile)
        return _COMMANDS[args.command](args)
    except Exception as err:
        logger.error("%s failed: %s", args.command, err)
        logger.debug("traceback", exc_info=True)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
