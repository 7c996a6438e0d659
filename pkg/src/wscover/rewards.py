"""Shared team reward: covering, soft energy penalty, collision and time terms."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .dynamics import StepEvents
from .world import RewardParams


@dataclass(frozen=True)
class RewardBreakdown:
    """Per-step shared reward, split by component.

    `covering` and `energy_penalty` are per-worker; `finish` is the one-off
    team completion bonus on the finishing step (0 otherwise) so that
    total == sum(covering) + sum(energy_penalty) + collision + time + finish
    holds exactly.
    """

    covering: tuple[float, ...]
    energy_penalty: tuple[float, ...]
    collision: float
    time: float
    finish: float
    total: float


def covering_reward(newly_covered: int, finished: bool, params: RewardParams) -> float:
    """Completion bonus on the finishing step, else per-cell reward for new area."""
    if finished:
        return params.r_finish
    return params.r_cover * newly_covered


def energy_penalty(p: float, p_e: float) -> float:
    """Truncated exponential penalty, active only below the exhaustion threshold."""
    if p >= p_e:
        return 0.0
    return -min(1.0, math.exp(p - p_e))


def shared_reward(
    events: StepEvents,
    energies: Sequence[float],
    params: RewardParams,
    p_e: float,
) -> RewardBreakdown:
    """Team reward for one step.

    Per-cell covering rewards accrue for every worker on every step including
    the finishing one (keeping the total coverage reward of the area an exact
    constant); the completion bonus is added once for the whole team, never
    per worker. Collisions are penalized per event; the time penalty stops on
    the finishing step.
    """
    covering = tuple(params.r_cover * c for c in events.newly_covered)
    penalty = tuple(energy_penalty(p, p_e) for p in energies)
    collision = params.r_collision * len(events.collisions)
    time = 0.0 if events.finished else params.r_time
    finish = params.r_finish if events.finished else 0.0
    total = sum(covering) + sum(penalty) + collision + time + finish
    return RewardBreakdown(
        covering=covering,
        energy_penalty=penalty,
        collision=collision,
        time=time,
        finish=finish,
        total=total,
    )


def discounted_return(step_totals: Sequence[float], gamma: float) -> float:
    """Sum of gamma^t * r_t over a finite reward sequence."""
    out = 0.0
    g = 1.0
    for r in step_totals:
        out += g * r
        g *= gamma
    return out
