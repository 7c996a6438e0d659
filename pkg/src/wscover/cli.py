"""Command line front end.

Exit codes: 0 success, 2 invalid input, 3 infeasible plan.
"""

from __future__ import annotations

import argparse
import importlib
import json
import math
import sys

from .harness import (
    bench,
    format_table,
    load_builtin_scenarios,
    load_suite,
    render_trace,
    resolve_scenario,
    run_episode,
    save_trace,
)
from .planners import InfeasiblePlanError, make_planner
from .world import InvalidScenarioError, load_scenario

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_INFEASIBLE = 3


def _load_external(spec: str):
    """Resolve 'module.path:factory' into a (worker, station) policy pair."""
    try:
        module_name, attr = spec.split(":", 1)
        factory = getattr(importlib.import_module(module_name), attr)
        pair = factory()
        worker_policy, station_policy = pair
        return worker_policy, station_policy
    except Exception as exc:
        raise InvalidScenarioError(f"cannot load external policy {spec!r}: {exc}") from exc


def _cmd_simulate(args) -> int:
    scenario = resolve_scenario(args.scenario)
    if args.planner == "external":
        if not args.external:
            raise InvalidScenarioError("--planner external requires --external module.path:factory")
        worker_policy, station_policy = _load_external(args.external)
    else:
        worker_policy, station_policy = make_planner(args.planner)
    metrics, trace = run_episode(scenario, worker_policy, station_policy, args.seed, planner_name=args.planner)
    if args.trace:
        save_trace(trace, args.trace)
    if args.render:
        render_trace(trace, args.render)
    t_finish = "inf" if math.isinf(metrics.t_finish) else f"{metrics.t_finish:.0f}"
    print(f"scenario={scenario.name} planner={args.planner} seed={args.seed}")
    print(
        f"t_finish={t_finish} steps={metrics.steps} coverage={metrics.coverage_curve[-1] if metrics.coverage_curve else 0.0:.4f} "
        f"collisions={metrics.collisions} recharges={metrics.recharge_events} return={metrics.discounted_return:.3f}"
    )
    return EXIT_OK


def _cmd_bench(args) -> int:
    suite = load_suite(args.suite, out_dir=args.out)
    rows = bench(suite)
    sys.stdout.write(format_table(rows))
    return EXIT_OK


def _cmd_scenario_validate(args) -> int:
    scenario = load_scenario(args.file)
    print(f"{scenario.name}: valid ({scenario.num_workers} workers, {scenario.num_stations} stations, "
          f"{scenario.num_interferers} interferers)")
    return EXIT_OK


def _cmd_scenario_list_builtin(_args) -> int:
    for name, s in sorted(load_builtin_scenarios().items()):
        print(
            f"{name}: {s.bounds[0]:.0f}x{s.bounds[1]:.0f}, cover radius {s.worker_limits.cover_radius:.0f}, "
            f"{s.num_workers} workers, {s.num_stations} stations, {s.num_interferers} interferers"
        )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wscover", description="Worker-station coverage simulator and benchmark harness")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run one episode")
    sim.add_argument("--scenario", required=True, help="scenario file or builtin name")
    sim.add_argument("--planner", required=True, choices=["mobile-bcd", "static-mstc", "mobile-mstc", "external"])
    sim.add_argument("--seed", type=int, required=True)
    sim.add_argument("--trace", help="write the episode trace (JSON lines)")
    sim.add_argument("--render", help="write a trajectory/coverage image (.ppm)")
    sim.add_argument("--external", help="module.path:factory returning (worker_policy, station_policy)")
    sim.set_defaults(func=_cmd_simulate)

    bn = sub.add_parser("bench", help="run a benchmark suite")
    bn.add_argument("--suite", required=True, help="suite description file (JSON)")
    bn.add_argument("--out", required=True, help="output directory for results")
    bn.set_defaults(func=_cmd_bench)

    sc = sub.add_parser("scenario", help="scenario utilities")
    sc_sub = sc.add_subparsers(dest="scenario_command", required=True)
    val = sc_sub.add_parser("validate", help="validate a scenario file")
    val.add_argument("file")
    val.set_defaults(func=_cmd_scenario_validate)
    lst = sc_sub.add_parser("list-builtin", help="list bundled scenarios")
    lst.set_defaults(func=_cmd_scenario_list_builtin)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InvalidScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except KeyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except InfeasiblePlanError as exc:
        print(f"infeasible plan: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE


if __name__ == "__main__":
    sys.exit(main())
