"""Episode runner: steps policies against the dynamics and records everything."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..coverage import CoverageGrid
from ..dynamics import Action, initial_state, step
from ..observation import ObservationEncoder
from ..rewards import discounted_return, shared_reward
from ..world import Scenario, rasterize, scenario_to_dict, scenario_from_dict

UNFINISHED = math.inf  # T_finish sentinel for episodes that never complete


class PolicyRoleError(ValueError):
    """A policy was passed for the wrong roster role."""


class PolicyActionError(ValueError):
    """A policy emitted something that is not a 2-component action."""


@dataclass
class EpisodeMetrics:
    t_finish: float  # steps, or UNFINISHED
    steps: int
    coverage_curve: list[float]
    collisions: int
    worker_distance: list[float]
    station_distance: list[float]
    recharge_events: int
    discounted_return: float
    reward_totals: dict

    @property
    def finished(self) -> bool:
        return math.isfinite(self.t_finish)


@dataclass
class EpisodeTrace:
    header: dict
    steps: list[dict] = field(default_factory=list)
    coverage_rows: list[str] = field(default_factory=list)


def _coerce_action(raw) -> Action:
    if isinstance(raw, Action):
        return raw
    try:
        u_v, u_w = raw
        return Action(float(u_v), float(u_w))
    except (TypeError, ValueError) as exc:
        raise PolicyActionError(f"policy returned {raw!r}, expected an Action or (u_v, u_w)") from exc


def run_episode(
    scenario: Scenario,
    worker_policy,
    station_policy,
    seed: int | None = None,
    planner_name: str = "",
    collect_trace: bool = True,
) -> tuple[EpisodeMetrics, EpisodeTrace]:
    """Run one seeded episode to completion or the step horizon.

    Deterministic for fixed (scenario, policies, seed): all randomness flows
    through the seed, and policies are re-prepared from scratch here.
    """
    from ..planners.policies import WorldView  # local import to avoid a cycle

    if getattr(worker_policy, "role", None) != "worker":
        raise PolicyRoleError("worker_policy must have role 'worker'")
    if getattr(station_policy, "role", None) != "station":
        raise PolicyRoleError("station_policy must have role 'station'")
    if seed is None:
        seed = scenario.seed
    grid = rasterize(scenario)
    m, n = scenario.num_workers, scenario.num_stations
    coverage = CoverageGrid(grid, m)
    state = initial_state(scenario, seed)
    worker_policy.prepare(scenario, grid, state, coverage, seed)
    station_policy.prepare(scenario, grid, state, coverage, seed)
    needs_obs = worker_policy.needs == "observation" or station_policy.needs == "observation"
    encoder = ObservationEncoder(scenario, grid) if needs_obs else None

    trace = EpisodeTrace(
        header={
            "format": "wscover-trace-v1",
            "scenario": scenario_to_dict(scenario),
            "seed": int(seed),
            "planner": planner_name,
        }
    )
    curve: list[float] = []
    totals = {"covering": 0.0, "energy": 0.0, "collision": 0.0, "time": 0.0, "finish": 0.0}
    step_rewards: list[float] = []
    collisions = 0
    recharges = 0
    worker_dist = [0.0] * m
    station_dist = [0.0] * n
    t_finish = UNFINISHED

    while not coverage.is_finished() and state.t < scenario.max_steps:
        view = WorldView(scenario, grid, state, coverage)
        actions: list[Action] = []
        for i in range(m):
            inp = encoder.observe(state, coverage, "worker", i) if worker_policy.needs == "observation" else view
            actions.append(_coerce_action(worker_policy.act(inp, i)))
        for j in range(n):
            inp = encoder.observe(state, coverage, "station", j) if station_policy.needs == "observation" else view
            actions.append(_coerce_action(station_policy.act(inp, j)))

        prev = state
        state, events = step(state, coverage, actions, scenario)
        fractions = state.worker_energy / scenario.energy.capacity
        breakdown = shared_reward(events, fractions, scenario.reward, scenario.energy.exhausted_threshold)

        for i in range(m):
            worker_dist[i] += float(np.hypot(*(state.worker_pose[i, :2] - prev.worker_pose[i, :2])))
        for j in range(n):
            station_dist[j] += float(np.hypot(*(state.station_pose[j, :2] - prev.station_pose[j, :2])))
        collisions += len(events.collisions)
        recharges += len(events.docked)
        totals["covering"] += sum(breakdown.covering)
        totals["energy"] += sum(breakdown.energy_penalty)
        totals["collision"] += breakdown.collision
        totals["time"] += breakdown.time
        totals["finish"] += breakdown.finish
        step_rewards.append(breakdown.total)
        curve.append(coverage.coverage_ratio())

        if collect_trace:
            trace.steps.append(
                {
                    "t": state.t,
                    "workers": [
                        [
                            float(state.worker_pose[i, 0]),
                            float(state.worker_pose[i, 1]),
                            float(state.worker_pose[i, 2]),
                            float(state.worker_vel[i, 0]),
                            float(state.worker_vel[i, 1]),
                            float(state.worker_energy[i]),
                            int(state.worker_docked[i]),
                        ]
                        for i in range(m)
                    ],
                    "stations": [
                        [
                            float(state.station_pose[j, 0]),
                            float(state.station_pose[j, 1]),
                            float(state.station_pose[j, 2]),
                            float(state.station_vel[j, 0]),
                            float(state.station_vel[j, 1]),
                        ]
                        for j in range(n)
                    ],
                    "interferers": [
                        [
                            float(state.intf_pose[k, 0]),
                            float(state.intf_pose[k, 1]),
                            float(state.intf_pose[k, 2]),
                            int(state.intf_timer[k]),
                        ]
                        for k in range(len(state.intf_pose))
                    ],
                    "actions": [[a.u_v, a.u_w] for a in actions],
                    "reward": {
                        "covering": list(breakdown.covering),
                        "energy": list(breakdown.energy_penalty),
                        "collision": breakdown.collision,
                        "time": breakdown.time,
                        "finish": breakdown.finish,
                        "total": breakdown.total,
                    },
                    "newly": list(events.newly_covered),
                    "collisions": [list(p) for p in events.collisions],
                    "docked": [list(p) for p in events.docked],
                    "released": list(events.released),
                    "ratio": coverage.coverage_ratio(),
                    "finished": events.finished,
                }
            )
        if events.finished:
            t_finish = float(state.t)
            break

    trace.coverage_rows = coverage.rle_rows()
    metrics = EpisodeMetrics(
        t_finish=t_finish,
        steps=state.t,
        coverage_curve=curve,
        collisions=collisions,
        worker_distance=worker_dist,
        station_distance=station_dist,
        recharge_events=recharges,
        discounted_return=discounted_return(step_rewards, scenario.reward.gamma),
        reward_totals=totals,
    )
    return metrics, trace


# ---------------------------------------------------------------------------
# trace file i/o: line-delimited JSON, one record per step
# ---------------------------------------------------------------------------


def _dump_record(record: dict) -> str:
    return json.dumps(record, sort_keys=True, separators=(",", ":"))


def save_trace(trace: EpisodeTrace, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(_dump_record({"type": "header", **trace.header}) + "\n")
        for rec in trace.steps:
            fh.write(_dump_record({"type": "step", **rec}) + "\n")
        fh.write(_dump_record({"type": "coverage", "rows": trace.coverage_rows}) + "\n")


def load_trace(path) -> EpisodeTrace:
    header: dict = {}
    steps: list[dict] = []
    rows: list[str] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            rec = json.loads(line)
            kind = rec.pop("type")
            if kind == "header":
                header = rec
            elif kind == "step":
                steps.append(rec)
            elif kind == "coverage":
                rows = rec["rows"]
    return EpisodeTrace(header=header, steps=steps, coverage_rows=rows)


def metrics_from_trace(trace: EpisodeTrace) -> EpisodeMetrics:
    """Recompute episode metrics from the recorded steps alone."""
    scenario = scenario_from_dict(trace.header["scenario"])
    m, n = scenario.num_workers, scenario.num_stations
    worker_dist = [0.0] * m
    station_dist = [0.0] * n
    prev_w = [(p.x, p.y) for p in scenario.worker_poses]
    prev_s = [(p.x, p.y) for p in scenario.station_poses]
    totals = {"covering": 0.0, "energy": 0.0, "collision": 0.0, "time": 0.0, "finish": 0.0}
    step_rewards: list[float] = []
    curve: list[float] = []
    collisions = 0
    recharges = 0
    t_finish = UNFINISHED
    steps = 0
    for rec in trace.steps:
        steps = rec["t"]
        for i in range(m):
            x, y = rec["workers"][i][0], rec["workers"][i][1]
            worker_dist[i] += math.hypot(x - prev_w[i][0], y - prev_w[i][1])
            prev_w[i] = (x, y)
        for j in range(n):
            x, y = rec["stations"][j][0], rec["stations"][j][1]
            station_dist[j] += math.hypot(x - prev_s[j][0], y - prev_s[j][1])
            prev_s[j] = (x, y)
        r = rec["reward"]
        totals["covering"] += sum(r["covering"])
        totals["energy"] += sum(r["energy"])
        totals["collision"] += r["collision"]
        totals["time"] += r["time"]
        totals["finish"] += r["finish"]
        step_rewards.append(r["total"])
        curve.append(rec["ratio"])
        collisions += len(rec["collisions"])
        recharges += len(rec["docked"])
        if rec["finished"]:
            t_finish = float(rec["t"])
    return EpisodeMetrics(
        t_finish=t_finish,
        steps=steps,
        coverage_curve=curve,
        collisions=collisions,
        worker_distance=worker_dist,
        station_distance=station_dist,
        recharge_events=recharges,
        discounted_return=discounted_return(step_rewards, scenario.reward.gamma),
        reward_totals=totals,
    )
