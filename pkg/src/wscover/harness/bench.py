"""Benchmark sweeps: (scenario x planner x seed) grids with aggregation."""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from ..world import InvalidScenarioError, Scenario, load_scenario, scenario_from_dict, scenario_to_dict
from .builtin import load_builtin_scenarios
from .episode import run_episode

THREADS_ENV = "WS_SIM_THREADS"


@dataclass
class BenchSuite:
    scenarios: list[str]  # builtin names or scenario file paths
    planners: list[str]
    seeds: list[int]
    out_dir: str | None = None
    zero_interferers: bool = False

    def validate(self) -> None:
        if not self.seeds:
            raise InvalidScenarioError("a bench suite needs at least one seed per pair")
        if not self.scenarios or not self.planners:
            raise InvalidScenarioError("a bench suite needs scenarios and planners")


def load_suite(path, out_dir=None) -> BenchSuite:
    try:
        d = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidScenarioError(f"cannot read suite {path}: {exc}") from exc
    seeds = d.get("seeds", 3)
    if isinstance(seeds, int):
        seeds = list(range(seeds))
    suite = BenchSuite(
        scenarios=list(d["scenarios"]),
        planners=list(d["planners"]),
        seeds=[int(s) for s in seeds],
        out_dir=out_dir,
        zero_interferers=bool(d.get("zero_interferers", False)),
    )
    suite.validate()
    return suite


def resolve_scenario(ref: str) -> Scenario:
    if os.path.exists(ref):
        return load_scenario(ref)
    builtins = load_builtin_scenarios()
    if ref in builtins:
        return builtins[ref]
    raise InvalidScenarioError(f"scenario {ref!r} is neither a file nor a builtin name")


def _episode_job(scenario_doc: dict, planner: str, seed: int) -> dict:
    from ..planners import make_planner  # fresh policies inside the worker process

    scenario = scenario_from_dict(scenario_doc)
    wp, sp = make_planner(planner)
    metrics, _ = run_episode(scenario, wp, sp, seed, planner_name=planner, collect_trace=False)
    return {
        "seed": seed,
        "t_finish": metrics.t_finish if metrics.finished else None,
        "steps": metrics.steps,
        "collisions": metrics.collisions,
        "recharges": metrics.recharge_events,
        "return": metrics.discounted_return,
    }


def bench(suite: BenchSuite) -> list[dict]:
    """Run the full grid and aggregate per (scenario, planner) pair.

    Episodes are mutually independent; WS_SIM_THREADS > 1 runs them in a
    process pool. Unfinished episodes keep a null T_finish and are reported
    in the failure count rather than silently clamped to the horizon.
    """
    suite.validate()
    threads = max(1, int(os.environ.get(THREADS_ENV, "1")))
    jobs = []
    for ref in suite.scenarios:
        scenario = resolve_scenario(ref)
        if suite.zero_interferers:
            scenario = scenario.with_interferers(0)
        doc = scenario_to_dict(scenario)
        for planner in suite.planners:
            for seed in suite.seeds:
                jobs.append((scenario.name, doc, planner, seed))

    results: dict[tuple[str, str], list[dict]] = {}
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            futures = [(name, planner, pool.submit(_episode_job, doc, planner, seed)) for name, doc, planner, seed in jobs]
            for name, planner, fut in futures:
                results.setdefault((name, planner), []).append(fut.result())
    else:
        for name, doc, planner, seed in jobs:
            results.setdefault((name, planner), []).append(_episode_job(doc, planner, seed))

    rows: list[dict] = []
    for ref in suite.scenarios:
        name = resolve_scenario(ref).name
        for planner in suite.planners:
            episodes = results[(name, planner)]
            finished = [e["t_finish"] for e in episodes if e["t_finish"] is not None]
            rows.append(
                {
                    "scenario": name,
                    "planner": planner,
                    "episodes": len(episodes),
                    "failures": len(episodes) - len(finished),
                    "t_finish_mean": (sum(finished) / len(finished)) if finished else None,
                    "t_finish_min": min(finished) if finished else None,
                    "t_finish_max": max(finished) if finished else None,
                    "per_episode": episodes,
                }
            )
    if suite.out_dir is not None:
        write_results(rows, suite.out_dir)
    return rows


def format_table(rows: list[dict]) -> str:
    header = ["scenario", "planner", "episodes", "failures", "t_finish_mean", "t_finish_min", "t_finish_max"]
    lines = ["\t".join(header)]
    for row in rows:
        cells = []
        for key in header:
            v = row[key]
            if v is None:
                cells.append("-")
            elif isinstance(v, float):
                cells.append(f"{v:.1f}")
            else:
                cells.append(str(v))
        lines.append("\t".join(cells))
    return "\n".join(lines) + "\n"


def write_results(rows: list[dict], out_dir) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "results.json").write_text(json.dumps(rows, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    (out / "results.tsv").write_text(format_table(rows), encoding="utf-8")
