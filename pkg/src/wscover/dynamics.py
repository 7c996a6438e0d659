"""State-transition model: kinematics, energy/docking, interferers, collisions.

One `step` advances the world by dt under a joint action, with sub-updates in
a fixed order: robot motion, interferer motion, collision detection with
revert, energy update and docking transitions, coverage sweeps, finish check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .coverage import CoverageGrid
from .world import Pose, Scenario, wrap_angle

WORKER, STATION, INTERFERER = "worker", "station", "interferer"


class EpisodeOverError(RuntimeError):
    """step() called after the coverage task finished or the horizon elapsed."""


class ActionCountError(ValueError):
    """Joint action length does not match the controllable roster."""


@dataclass(frozen=True)
class Action:
    u_v: float = 0.0
    u_w: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "u_v", min(1.0, max(-1.0, float(self.u_v))))
        object.__setattr__(self, "u_w", min(1.0, max(-1.0, float(self.u_w))))


@dataclass(frozen=True)
class StepEvents:
    collisions: tuple[tuple[str, str], ...]
    newly_covered: tuple[int, ...]
    finished: bool
    docked: tuple[tuple[int, int], ...]  # (worker, station)
    released: tuple[int, ...]


def scale_action(a: Action, limits) -> tuple[float, float]:
    """Dimensionless action to velocity commands (v, omega)."""
    return a.u_v * limits.v_max, a.u_w * limits.omega_max


def integrate_unicycle(pose: Pose, v: float, omega: float, dt: float) -> Pose:
    """Exact-arc unicycle update; straight-line motion when omega == 0."""
    if abs(omega) < 1e-12:
        return Pose(
            pose.x + v * dt * math.cos(pose.heading),
            pose.y + v * dt * math.sin(pose.heading),
            pose.heading,
        )
    h1 = pose.heading + omega * dt
    r = v / omega
    return Pose(
        pose.x + r * (math.sin(h1) - math.sin(pose.heading)),
        pose.y - r * (math.cos(h1) - math.cos(pose.heading)),
        wrap_angle(h1),
    )


def update_energy(e_prev: float, dist_to_nearest_station: float, params) -> float:
    """Distance-gated discharge/recharge with clamps at 0 and capacity."""
    if dist_to_nearest_station > params.rendezvous_radius:
        return max(0.0, e_prev - params.e_discharge)
    return min(params.capacity, e_prev + params.e_charge)


def resolve_docking(
    energy: float,
    docked_to: int,
    worker_xy: np.ndarray,
    station_xy: np.ndarray,
    params,
) -> tuple[int, bool, bool]:
    """Docking state machine for one worker.

    Docks iff exhausted (p strictly below threshold) and within the rendezvous
    radius of some station (nearest wins, ties to the lowest index); releases
    iff fully recharged. Returns (docked_to, docked_now, released_now).
    """
    if docked_to >= 0:
        if energy >= params.capacity:
            return -1, False, True
        return docked_to, False, False
    if energy / params.capacity < params.exhausted_threshold:
        d = np.hypot(station_xy[:, 0] - worker_xy[0], station_xy[:, 1] - worker_xy[1])
        j = int(np.argmin(d))
        if d[j] <= params.rendezvous_radius:
            return j, True, False
    return docked_to, False, False


# ---------------------------------------------------------------------------
# obstacle geometry, prepared once per obstacle set
# ---------------------------------------------------------------------------


class ObstacleGeometry:
    """Stacked obstacle edges for vectorized disc/point queries."""

    def __init__(self, obstacles: tuple):
        segs_a, segs_b, owner = [], [], []
        starts = []
        e = 0
        for pi, poly in enumerate(obstacles):
            arr = np.asarray(poly, dtype=float)
            starts.append(e)
            n = arr.shape[0]
            for k in range(n):
                segs_a.append(arr[k])
                segs_b.append(arr[(k + 1) % n])
                owner.append(pi)
            e += n
        self.num_polys = len(obstacles)
        if e:
            self.a = np.array(segs_a)
            self.b = np.array(segs_b)
            self.starts = np.array(starts, dtype=int)
        else:
            self.a = np.zeros((0, 2))
            self.b = np.zeros((0, 2))
            self.starts = np.zeros(0, dtype=int)

    def min_edge_distance(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if self.a.shape[0] == 0:
            return np.full(len(pts), np.inf)
        e = self.b - self.a  # (E, 2)
        ll = np.einsum("ij,ij->i", e, e)
        ll = np.where(ll == 0.0, 1.0, ll)
        w = pts[:, None, :] - self.a[None, :, :]  # (P, E, 2)
        t = np.clip(np.einsum("pek,ek->pe", w, e) / ll[None, :], 0.0, 1.0)
        proj = self.a[None, :, :] + t[..., None] * e[None, :, :]
        d = np.linalg.norm(pts[:, None, :] - proj, axis=-1)
        return d.min(axis=1)

    def inside_any(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if self.a.shape[0] == 0:
            return np.zeros(len(pts), dtype=bool)
        x, y = pts[:, 0:1], pts[:, 1:2]  # (P, 1)
        x1, y1 = self.a[:, 0][None, :], self.a[:, 1][None, :]
        x2, y2 = self.b[:, 0][None, :], self.b[:, 1][None, :]
        cond = (y1 > y) != (y2 > y)
        with np.errstate(divide="ignore", invalid="ignore"):
            xin = (x2 - x1) * (y - y1) / (y2 - y1) + x1
        hits = cond & (x < xin)
        crossings = np.add.reduceat(hits.astype(np.int64), self.starts, axis=1)
        return ((crossings % 2) == 1).any(axis=1)

    def disc_blocked(self, points: np.ndarray, radius: float) -> np.ndarray:
        """True where a body disc of given radius intersects any obstacle."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if self.a.shape[0] == 0:
            return np.zeros(len(pts), dtype=bool)
        return (self.min_edge_distance(pts) < radius) | self.inside_any(pts)


@lru_cache(maxsize=64)
def obstacle_geometry(obstacles: tuple) -> ObstacleGeometry:
    return ObstacleGeometry(obstacles)


# ---------------------------------------------------------------------------
# world state
# ---------------------------------------------------------------------------


@dataclass
class WorldState:
    t: int
    worker_pose: np.ndarray  # (m, 3) x, y, heading
    worker_vel: np.ndarray  # (m, 2) realized (v, omega)
    worker_energy: np.ndarray  # (m,)
    worker_docked: np.ndarray  # (m,) station index or -1
    station_pose: np.ndarray  # (n, 3)
    station_vel: np.ndarray  # (n, 2)
    intf_pose: np.ndarray  # (k, 3)
    intf_timer: np.ndarray  # (k,) steps left in the current straight phase
    rngs: list  # one np.random.Generator per interferer

    def copy(self) -> "WorldState":
        return WorldState(
            t=self.t,
            worker_pose=self.worker_pose.copy(),
            worker_vel=self.worker_vel.copy(),
            worker_energy=self.worker_energy.copy(),
            worker_docked=self.worker_docked.copy(),
            station_pose=self.station_pose.copy(),
            station_vel=self.station_vel.copy(),
            intf_pose=self.intf_pose.copy(),
            intf_timer=self.intf_timer.copy(),
            rngs=[_clone_rng(g) for g in self.rngs],
        )

    def released(self, i: int) -> bool:
        return self.worker_docked[i] < 0

    def worker_fraction(self, i: int, capacity: float) -> float:
        return float(self.worker_energy[i]) / capacity


def _clone_rng(g: np.random.Generator) -> np.random.Generator:
    fresh = np.random.Generator(type(g.bit_generator)())
    fresh.bit_generator.state = g.bit_generator.state
    return fresh


def initial_state(scenario: Scenario, seed: int | None = None) -> WorldState:
    """World state at t=0: scenario poses, full batteries, seeded interferer RNGs."""
    if seed is None:
        seed = scenario.seed
    m, n, k = scenario.num_workers, scenario.num_stations, scenario.num_interferers
    ss = np.random.SeedSequence(seed)
    children = ss.spawn(k) if k else []
    return WorldState(
        t=0,
        worker_pose=np.array([p.as_tuple() for p in scenario.worker_poses], dtype=float).reshape(m, 3),
        worker_vel=np.zeros((m, 2)),
        worker_energy=np.full(m, scenario.energy.capacity, dtype=float),
        worker_docked=np.full(m, -1, dtype=np.int64),
        station_pose=np.array([p.as_tuple() for p in scenario.station_poses], dtype=float).reshape(n, 3),
        station_vel=np.zeros((n, 2)),
        intf_pose=np.array([p.as_tuple() for p in scenario.interferer_poses], dtype=float).reshape(k, 3),
        intf_timer=np.full(k, scenario.interferer.period, dtype=np.int64),
        rngs=[np.random.default_rng(c) for c in children],
    )


# ---------------------------------------------------------------------------
# interferers
# ---------------------------------------------------------------------------


def interferer_step(
    pose: tuple[float, float, float],
    timer: int,
    scenario: Scenario,
    rng: np.random.Generator,
) -> tuple[tuple[float, float, float], int]:
    """Straight-then-rotate loop with reflection off bounds and obstacles.

    When the phase timer runs out the heading gets a uniform random offset in
    [-pi, pi) and the position stays put for that sub-update; otherwise the
    interferer advances speed*dt along its heading, reversing the offending
    velocity component when the move would leave free space.
    """
    x, y, h = pose
    params = scenario.interferer
    if timer <= 0:
        h = wrap_angle(h + float(rng.uniform(-math.pi, math.pi)))
        return (x, y, h), int(params.period)

    step_len = params.speed * scenario.dt
    r = params.body_radius
    w, hgt = scenario.bounds
    geom = obstacle_geometry(scenario.obstacles)
    dx, dy = math.cos(h) * step_len, math.sin(h) * step_len

    nx, ny = x + dx, y + dy
    flip_x = -1.0 if (nx < r or nx > w - r) else 1.0
    flip_y = -1.0 if (ny < r or ny > hgt - r) else 1.0
    tried = [(flip_x, flip_y)]
    for cand in ((1.0, 1.0), (-1.0, 1.0), (1.0, -1.0), (-1.0, -1.0)):
        if cand not in tried:
            tried.append(cand)

    for fx, fy in tried:
        cx, cy = x + fx * dx, y + fy * dy
        if not (r <= cx <= w - r and r <= cy <= hgt - r):
            continue
        if geom.disc_blocked(np.array([[cx, cy]]), r)[0]:
            continue
        nh = h if (fx > 0 and fy > 0) else wrap_angle(math.atan2(fy * dy, fx * dx))
        return (cx, cy, nh), int(timer - 1)
    # boxed in: stay put for this sub-update
    return (x, y, h), int(timer - 1)


# ---------------------------------------------------------------------------
# collisions
# ---------------------------------------------------------------------------


def _bodies(state: WorldState, scenario: Scenario):
    names, xy, radii = [], [], []
    for i in range(len(state.worker_pose)):
        names.append(f"{WORKER}:{i}")
        xy.append(state.worker_pose[i, :2])
        radii.append(scenario.worker_limits.body_radius)
    for j in range(len(state.station_pose)):
        names.append(f"{STATION}:{j}")
        xy.append(state.station_pose[j, :2])
        radii.append(scenario.station_limits.body_radius)
    for k in range(len(state.intf_pose)):
        names.append(f"{INTERFERER}:{k}")
        xy.append(state.intf_pose[k, :2])
        radii.append(scenario.interferer.body_radius)
    return names, np.array(xy).reshape(len(names), 2), np.array(radii)


def detect_collisions(state: WorldState, scenario: Scenario) -> tuple[tuple[str, str], ...]:
    """All colliding body pairs plus robot/obstacle and robot/bounds contacts.

    A pair collides iff center distance is strictly below the sum of body
    radii; docked worker/station pairs are exempt. Obstacle and boundary
    contacts are reported for workers and stations only (interferers keep out
    of static geometry by construction of their motion rule).
    """
    names, xy, radii = _bodies(state, scenario)
    m = len(state.worker_pose)
    pairs: list[tuple[str, str]] = []
    nb = len(names)
    for a in range(nb):
        for b in range(a + 1, nb):
            if names[a].startswith(WORKER) and names[b].startswith(STATION):
                wi = int(names[a].split(":")[1])
                sj = int(names[b].split(":")[1])
                if state.worker_docked[wi] == sj:
                    continue
            dx = xy[a, 0] - xy[b, 0]
            dy = xy[a, 1] - xy[b, 1]
            if math.hypot(dx, dy) < radii[a] + radii[b]:
                pairs.append((names[a], names[b]))

    geom = obstacle_geometry(scenario.obstacles)
    w, h = scenario.bounds
    n_ctrl = m + len(state.station_pose)
    ctrl_xy = xy[:n_ctrl]
    ctrl_r = radii[:n_ctrl]
    if geom.num_polys:
        e_dist = geom.min_edge_distance(ctrl_xy)
        inside = geom.inside_any(ctrl_xy)
        for idx in range(n_ctrl):
            if inside[idx] or e_dist[idx] < ctrl_r[idx]:
                hit_poly = 0
                for pi, poly in enumerate(scenario.obstacles):
                    single = obstacle_geometry((poly,))
                    if single.disc_blocked(ctrl_xy[idx : idx + 1], ctrl_r[idx])[0]:
                        hit_poly = pi
                        break
                pairs.append((names[idx], f"obstacle:{hit_poly}"))
    for idx in range(n_ctrl):
        x, y = ctrl_xy[idx]
        r = ctrl_r[idx]
        if x < r or x > w - r or y < r or y > h - r:
            pairs.append((names[idx], "bounds"))
    return tuple(pairs)


# ---------------------------------------------------------------------------
# the transition function
# ---------------------------------------------------------------------------


def step(
    state: WorldState,
    coverage: CoverageGrid,
    joint_actions,
    scenario: Scenario,
) -> tuple[WorldState, StepEvents]:
    """Advance one step under a joint action (workers first, then stations)."""
    m, n = scenario.num_workers, scenario.num_stations
    if coverage.is_finished():
        raise EpisodeOverError("coverage task already finished")
    if state.t >= scenario.max_steps:
        raise EpisodeOverError(f"horizon of {scenario.max_steps} steps elapsed")
    if len(joint_actions) != m + n:
        raise ActionCountError(f"expected {m + n} actions (workers then stations), got {len(joint_actions)}")

    params = scenario.energy
    dt = scenario.dt
    new = state.copy()

    # (1) move controllable robots; docked or drained workers ignore actions
    for j in range(n):
        v, omega = scale_action(joint_actions[m + j], scenario.station_limits)
        pose = integrate_unicycle(Pose(*state.station_pose[j]), v, omega, dt)
        new.station_pose[j] = pose.as_tuple()
        new.station_vel[j] = (v, omega)
    for i in range(m):
        docked = state.worker_docked[i]
        if docked >= 0:
            delta = new.station_pose[docked, :2] - state.station_pose[docked, :2]
            new.worker_pose[i, :2] = state.worker_pose[i, :2] + delta
            new.worker_vel[i] = (0.0, 0.0)
            continue
        if not params.soft and state.worker_energy[i] <= 0.0:
            new.worker_vel[i] = (0.0, 0.0)
            continue
        v, omega = scale_action(joint_actions[i], scenario.worker_limits)
        pose = integrate_unicycle(Pose(*state.worker_pose[i]), v, omega, dt)
        new.worker_pose[i] = pose.as_tuple()
        new.worker_vel[i] = (v, omega)

    # (2) interferers
    for k in range(len(state.intf_pose)):
        pose, timer = interferer_step(tuple(new.intf_pose[k]), int(new.intf_timer[k]), scenario, new.rngs[k])
        new.intf_pose[k] = pose
        new.intf_timer[k] = timer

    # (3) collisions; involved workers/stations revert to their pre-step
    # position (heading keeps its update: rotation cannot tunnel, and letting
    # it persist lets a blocked robot turn itself free)
    collisions = detect_collisions(new, scenario)
    if collisions:
        reverted = {name for pair in collisions for name in pair}
        for j in range(n):
            if f"{STATION}:{j}" in reverted:
                new.station_pose[j, :2] = state.station_pose[j, :2]
                new.station_vel[j, 0] = 0.0
        for i in range(m):
            docked = state.worker_docked[i]
            if docked >= 0:
                # riders track their (possibly reverted) station
                delta = new.station_pose[docked, :2] - state.station_pose[docked, :2]
                new.worker_pose[i, :2] = state.worker_pose[i, :2] + delta
            elif f"{WORKER}:{i}" in reverted:
                new.worker_pose[i, :2] = state.worker_pose[i, :2]
                new.worker_vel[i, 0] = 0.0

    # (4) energy update, then docking transitions
    for i in range(m):
        if new.worker_docked[i] >= 0:
            new.worker_energy[i] = min(params.capacity, new.worker_energy[i] + params.e_charge)
        else:
            e = new.worker_energy[i] - params.e_discharge
            new.worker_energy[i] = e if params.soft else max(0.0, e)
    docked_events: list[tuple[int, int]] = []
    released_events: list[int] = []
    for i in range(m):
        docked_to, dock_now, release_now = resolve_docking(
            float(new.worker_energy[i]),
            int(new.worker_docked[i]),
            new.worker_pose[i, :2],
            new.station_pose[:, :2],
            params,
        )
        new.worker_docked[i] = docked_to
        if dock_now:
            docked_events.append((i, docked_to))
            new.worker_vel[i] = (0.0, 0.0)
        if release_now:
            released_events.append(i)

    # (5) coverage sweeps for released workers with energy left, lowest index first
    newly = [0] * m
    for i in range(m):
        if new.worker_docked[i] < 0 and new.worker_energy[i] > 0.0:
            newly[i] = coverage.sweep(i, new.worker_pose[i, :2], scenario.worker_limits.cover_radius)

    # (6) finish check
    finished = coverage.is_finished()
    new.t = state.t + 1
    events = StepEvents(
        collisions=collisions,
        newly_covered=tuple(newly),
        finished=finished,
        docked=tuple(docked_events),
        released=tuple(released_events),
    )
    return new, events
