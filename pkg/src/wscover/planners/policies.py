"""Runtime decision layer: the policy interface, trackers and safety wrappers.

Baseline policies are centralized: they act on full world snapshots. Learned
or external policies plug in through the same interface with
``needs = "observation"`` and receive ObservationBundles instead.

Teammate handling is reactive: collisions simply revert in the dynamics, and
a robot that detects it has stopped making progress deflects its heading
rightward with a growing angle until it slips past whatever pinned it. That
keeps formations overhead-free and makes head-on meetings self-resolving
(both parties bear right).
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from ..coverage import CoverageGrid
from ..dynamics import Action, WorldState
from ..world import CellGrid, Scenario, wrap_angle
from .baselines import mobile_bcd_plan, mobile_mstc_star, static_mstc_plan
from .bcd import bcd_decompose, cell_lanes
from .nav import DisconnectedAreaError, distance_field, make_nav, route
from .stc import CoveragePlan


@dataclass(frozen=True)
class WorldView:
    """Read-only snapshot handed to centralized policies each step."""

    scenario: Scenario
    grid: CellGrid
    state: WorldState
    coverage: CoverageGrid


class Policy:
    """Maps a view (world snapshot or observation) and agent index to an action."""

    role = "worker"  # or "station"
    needs = "world"  # or "observation"

    def prepare(self, scenario: Scenario, grid: CellGrid, state: WorldState, coverage: CoverageGrid, seed: int) -> None:
        """Reset per-episode state; called once before the first step."""

    def act(self, view, index: int) -> Action:
        raise NotImplementedError


class RandomPolicy(Policy):
    """Seeded uniform actions; exercises the external-policy plumbing."""

    needs = "observation"

    def __init__(self, role: str):
        self.role = role
        self._rng = np.random.default_rng(0)

    def prepare(self, scenario, grid, state, coverage, seed):
        self._rng = np.random.default_rng([seed, 7 if self.role == "worker" else 13])

    def act(self, view, index: int) -> Action:
        u = self._rng.uniform(-1.0, 1.0, 2)
        return Action(float(u[0]), float(u[1]))


# ---------------------------------------------------------------------------
# steering primitives
# ---------------------------------------------------------------------------


def steer_to(pose, target, limits, dt: float, stop_at: float = 0.0) -> Action:
    """Rotate-then-drive proportional controller in the [-1, 1] action space."""
    dx = float(target[0]) - pose[0]
    dy = float(target[1]) - pose[1]
    dist = math.hypot(dx, dy)
    err = wrap_angle(math.atan2(dy, dx) - pose[2])
    u_w = max(-1.0, min(1.0, err / (limits.omega_max * dt)))
    if abs(err) > math.pi / 4.0:
        return Action(0.0, u_w)
    u_v = max(0.0, min(1.0, (dist - stop_at) / (limits.v_max * dt)))
    # slow down while turning so arc deviation stays within the nav clearance
    u_v *= 1.0 - abs(err) / (math.pi / 4.0)
    return Action(u_v, u_w)


def waypoint_tracker(pose, waypoints: deque, limits, dt: float, arrive_tol: float) -> Action:
    """Track the head of a waypoint queue, popping entries within arrive_tol."""
    while waypoints:
        t = waypoints[0]
        if math.hypot(float(t[0]) - pose[0], float(t[1]) - pose[1]) > arrive_tol:
            break
        waypoints.popleft()
    if not waypoints:
        return Action(0.0, 0.0)
    return steer_to(pose, waypoints[0], limits, dt)


def wait_and_move(planned: Action, pose, hazards_xy, limits, dt: float, stop_distance: float, lookahead_steps: int = 3) -> Action:
    """Zero the action while any hazard sits near the straight lookahead corridor.

    The corridor is the segment of length lookahead_steps * v_max * dt along
    the direction of planned travel; a hazard within stop_distance of it
    forces a full stop, otherwise the planned action passes through.
    """
    if planned.u_v == 0.0 or len(hazards_xy) == 0:
        return planned
    sign = 1.0 if planned.u_v > 0 else -1.0
    hx = sign * math.cos(pose[2])
    hy = sign * math.sin(pose[2])
    length = lookahead_steps * limits.v_max * dt
    for q in np.asarray(hazards_xy, dtype=float).reshape(-1, 2):
        wx, wy = q[0] - pose[0], q[1] - pose[1]
        t = max(0.0, min(length, wx * hx + wy * hy))
        if math.hypot(wx - t * hx, wy - t * hy) < stop_distance:
            return Action(0.0, 0.0)
    return planned


def station_nearest_exhausted(view: WorldView, station_index: int, standoff: float | None = None) -> Action:
    """Steer a station toward the nearest undocked exhausted worker, else hold."""
    sc = view.scenario
    en = sc.energy
    if standoff is None:
        standoff = 0.7 * en.rendezvous_radius
    pose = view.state.station_pose[station_index]
    target = _nearest_exhausted_xy(view, pose)
    if target is None:
        return Action(0.0, 0.0)
    return steer_to(pose, target, sc.station_limits, sc.dt, stop_at=standoff)


def _nearest_exhausted_xy(view: WorldView, pose) -> tuple[float, float] | None:
    st = view.state
    en = view.scenario.energy
    fractions = st.worker_energy / en.capacity
    best = None
    for i in range(len(st.worker_pose)):
        if st.worker_docked[i] >= 0 or fractions[i] >= en.exhausted_threshold:
            continue
        d = math.hypot(st.worker_pose[i, 0] - pose[0], st.worker_pose[i, 1] - pose[1])
        if best is None or d < best[0]:
            best = (d, i)
    if best is None:
        return None
    return (float(st.worker_pose[best[1], 0]), float(st.worker_pose[best[1], 1]))


# ---------------------------------------------------------------------------
# reactive anti-pinning deflection
# ---------------------------------------------------------------------------


class StuckTracker:
    """Counts consecutive steps a robot wanted to move but stayed in place."""

    def __init__(self, n: int):
        self.last: list[tuple[float, float] | None] = [None] * n
        self.wanted = [False] * n
        self.count = [0] * n

    def update(self, idx: int, pose) -> int:
        last = self.last[idx]
        if last is not None:
            moved = math.hypot(pose[0] - last[0], pose[1] - last[1])
            if moved >= 0.05:
                # decay instead of reset: partial escapes keep their memory
                self.count[idx] = max(0, self.count[idx] - 2)
            elif self.wanted[idx]:
                # commanded translation but stayed put: reverted or zeroed
                self.count[idx] += 1
            # turning in place or waiting deliberately is neutral
        self.last[idx] = (float(pose[0]), float(pose[1]))
        return self.count[idx]

    def note_intent(self, idx: int, wanted: bool) -> None:
        """Record whether the final command actually tried to translate."""
        self.wanted[idx] = wanted

    def reset(self, idx: int) -> None:
        self.count[idx] = 0
        self.wanted[idx] = False


def deflect_right(action: Action, pose, target_xy, limits, dt: float, stuck: int) -> Action:
    """Bear right with a growing angle while pinned; both sides of a head-on
    meeting do the same and slip past each other.

    Applies whenever the robot is pinned and has a movement goal, including
    during the rotate-in-place phase; gating on the instantaneous forward
    command would flip-flop between the deflected and plain bearings.
    """
    if stuck < 3:
        return action
    # wrap rather than cap: the aim direction keeps cycling until some
    # direction is free, so a walled-in robot cannot reach a fixed point
    angle = math.fmod(0.35 * (stuck - 2), 2.0 * math.pi)
    if target_xy is None:
        base_bearing = pose[2]
    else:
        base_bearing = math.atan2(target_xy[1] - pose[1], target_xy[0] - pose[0])
    bearing = base_bearing - angle
    reach = 2.0 * limits.v_max * dt
    aim = (pose[0] + math.cos(bearing) * reach, pose[1] + math.sin(bearing) * reach)
    return steer_to(pose, aim, limits, dt)


def _static_occupant(view: WorldView, point, clearance: float) -> bool:
    """True when a durably immobile robot sits within clearance of a point.

    Durably immobile means a fully idle station, or a worker that is docked
    or out of energy; a teammate that merely paused or is turning in place
    will move on and does not forfeit the waypoint.
    """
    st = view.state
    en = view.scenario.energy
    for j in range(len(st.station_pose)):
        if (
            abs(float(st.station_vel[j, 0])) < 1e-9
            and abs(float(st.station_vel[j, 1])) < 1e-9
            and math.hypot(st.station_pose[j, 0] - point[0], st.station_pose[j, 1] - point[1]) < clearance
        ):
            return True
    for i in range(len(st.worker_pose)):
        immobile = st.worker_docked[i] >= 0 or (not en.soft and st.worker_energy[i] <= 0.0)
        if immobile and math.hypot(st.worker_pose[i, 0] - point[0], st.worker_pose[i, 1] - point[1]) < clearance:
            return True
    return False


# ---------------------------------------------------------------------------
# plan-following baseline policies
# ---------------------------------------------------------------------------


class PlanSlot:
    """Shares one offline CoveragePlan between the worker and station policies."""

    def __init__(self, builder):
        self.builder = builder
        self.plan: CoveragePlan | None = None
        self._key = None

    def get(self, scenario: Scenario, grid: CellGrid) -> CoveragePlan:
        key = (id(scenario), id(grid))
        if self.plan is None or self._key != key:
            self.plan = self.builder(scenario, grid)
            self._key = key
        return self.plan


class PlanWorkerPolicy(Policy):
    """Executes per-worker waypoint legs with recharge guard and mop-up replans.

    On top of the offline plan the runtime layer adds: clearance-safe
    re-routing whenever a leg target is not directly reachable from the
    current pose, an energy guard that injects a dock leg before the battery
    could strand the worker, the reactive right-deflection against pinning,
    and the wait-and-move stop against interferers.
    """

    role = "worker"

    def __init__(self, slot: PlanSlot, replan: bool = True):
        self._slot = slot
        self._replan = replan

    def prepare(self, scenario, grid, state, coverage, seed):
        plan = self._slot.get(scenario, grid)
        self.grid = grid
        self.nav = make_nav(grid, scenario.obstacles, scenario.worker_limits.body_radius)
        self.arrive_tol = float(plan.meta.get("arrive_tol", 0.5 * scenario.worker_limits.cover_radius))
        self.lane_width = 2.0 * scenario.worker_limits.cover_radius
        m = scenario.num_workers
        self.queues = [deque(legs) for legs in plan.worker_legs]
        self._was_docked = [False] * m
        self._head_checked = [False] * m
        self._unreachable: list[set] = [set() for _ in range(m)]
        self._mop_cache: tuple[int, dict] | None = None
        self._returning = [False] * m
        self._stuck = StuckTracker(m)
        # geodesic steps home from each station's initial pose (for the guard)
        self._home_fields = [distance_field(self.nav, (p.x, p.y)) for p in scenario.station_poses]
        self._station_init = [(p.x, p.y) for p in scenario.station_poses]

    # -- helpers -----------------------------------------------------------

    def _goto_tol(self) -> float:
        # below the routing granularity, so freshly inserted detour hops
        # cannot be swallowed by their own arrival tolerance
        return min(self.arrive_tol, 0.35 * self.grid.resolution)

    def _steps_home(self, scenario, state, pose) -> float:
        """Conservative travel steps to the closest reachable station."""
        grid = self.grid
        speed = scenario.worker_limits.v_max * scenario.dt
        ix, iy = grid.index_of((pose[0], pose[1]))
        ix = min(max(ix, 0), grid.width - 1)
        iy = min(max(iy, 0), grid.height - 1)
        best = math.inf
        for j in range(len(state.station_pose)):
            sx, sy = state.station_pose[j, 0], state.station_pose[j, 1]
            drift = math.hypot(sx - self._station_init[j][0], sy - self._station_init[j][1])
            if drift <= 2.0 * grid.resolution:
                cells = self._home_fields[j][ix, iy]
                est = cells * grid.resolution / speed if math.isfinite(cells) else math.inf
            else:
                # station has moved (and may keep moving): wider margin
                est = 2.0 * math.hypot(sx - pose[0], sy - pose[1]) / speed
            best = min(best, est)
        if not math.isfinite(best):
            best = min(
                math.hypot(state.station_pose[j, 0] - pose[0], state.station_pose[j, 1] - pose[1])
                for j in range(len(state.station_pose))
            ) / speed
        return best

    def _ensure_head_route(self, q: deque, pose, i: int) -> bool:
        """Expand the head leg into clearance-safe hops; drop it when unreachable."""
        kind, target = q[0][0], q[0][1]
        if self.nav.segment_clear((pose[0], pose[1]), target):
            return True
        try:
            hops = route(self.nav, (pose[0], pose[1]), target)
        except DisconnectedAreaError:
            self._unreachable[i].add((round(target[0], 3), round(target[1], 3)))
            q.popleft()
            return False
        q.popleft()
        for hop in reversed(hops):
            q.appendleft((kind if hop == hops[-1] else "goto", hop))
        return True

    def _mop_up(self, view: WorldView, i: int) -> bool:
        """Serpentine lanes over the nearest uncovered patch; True when legs were added."""
        cov = view.coverage
        covered_count = cov.covered_count
        if covered_count == cov.free_count:
            return False
        if self._mop_cache is not None and self._mop_cache[0] == covered_count:
            lanes_by_cell = self._mop_cache[1]
        else:
            g = self.grid
            pseudo = CellGrid(g.width, g.height, g.origin, g.resolution, ~cov.uncovered_mask())
            lanes_by_cell = {c.id: cell_lanes(c, pseudo, self.lane_width) for c in bcd_decompose(pseudo)}
            self._mop_cache = (covered_count, lanes_by_cell)
        pose = view.state.worker_pose[i]
        best = None
        for cid in lanes_by_cell:
            for lane in lanes_by_cell[cid]:
                for end in lane.endpoints():
                    key = (round(end[0], 3), round(end[1], 3))
                    if key in self._unreachable[i]:
                        continue
                    d = math.hypot(end[0] - pose[0], end[1] - pose[1])
                    if best is None or d < best[0]:
                        best = (d, cid, end)
        if best is None:
            return False
        _, cid, entry = best
        lanes = lanes_by_cell[cid]
        if lanes and abs(lanes[-1].x - entry[0]) < abs(lanes[0].x - entry[0]):
            lanes = list(reversed(lanes))
        q = self.queues[i]
        pos = (pose[0], pose[1])
        for lane in lanes:
            lo, hi = lane.endpoints()
            d_lo = math.hypot(lo[0] - pos[0], lo[1] - pos[1])
            d_hi = math.hypot(hi[0] - pos[0], hi[1] - pos[1])
            enter, leave = (lo, hi) if d_lo <= d_hi else (hi, lo)
            q.append(("goto", enter))
            if leave != enter:
                q.append(("cover", leave))
            pos = leave
        return True

    # -- the policy --------------------------------------------------------

    def act(self, view: WorldView, i: int) -> Action:
        sc = view.scenario
        st = view.state
        en = sc.energy
        lim = sc.worker_limits
        pose = st.worker_pose[i]
        q = self.queues[i]

        if st.worker_docked[i] >= 0:
            self._was_docked[i] = True
            self._stuck.reset(i)
            return Action(0.0, 0.0)
        if self._was_docked[i]:
            # released (or rode the station somewhere new): drop the dock leg
            # and re-validate the head route from wherever we are now
            self._was_docked[i] = False
            if q and q[0][0] == "dock":
                q.popleft()
            self._returning[i] = False
            self._head_checked[i] = False
        if not en.soft and st.worker_energy[i] <= 0.0:
            return Action(0.0, 0.0)

        stuck = self._stuck.update(i, pose)
        if stuck >= 120 and q and q[0][0] != "dock":
            # pinned beyond hope on this leg: abandon it for now
            self._unreachable[i].add((round(q[0][1][0], 3), round(q[0][1][1], 3)))
            q.popleft()
            self._head_checked[i] = False
            self._stuck.reset(i)
            stuck = 0

        # knot turn-taking: when several workers are jammed together, the
        # lowest index moves first and the rest hold still for it (unless
        # they are heading home to recharge; survival beats etiquette)
        if stuck >= 15 and not (self._returning[i] or (q and q[0][0] == "dock")):
            for k in range(i):
                if self._stuck.count[k] >= 10 and st.worker_docked[k] < 0 and (
                    math.hypot(st.worker_pose[k, 0] - pose[0], st.worker_pose[k, 1] - pose[1]) < 2.5
                ):
                    self._stuck.note_intent(i, False)
                    return Action(0.0, 0.0)

        # energy guard: head home before the battery can strand us; a dock
        # leg scheduled further down the plan must not suppress it. The
        # per-worker offset staggers returns so arrivals do not bunch up.
        if not (self._returning[i] or (q and q[0][0] == "dock")):
            steps_left = max(0.0, st.worker_energy[i] - 0.05 * en.capacity) / en.e_discharge
            if steps_left <= 1.35 * self._steps_home(sc, st, pose) + 40.0 + 12.0 * i:
                q.appendleft(("dock", None))
                self._returning[i] = True
                self._head_checked[i] = False

        action = Action(0.0, 0.0)
        current_target = None
        legit_wait = False
        for _ in range(64):  # bounded leg dispatch per step
            if not q:
                if not (self._replan and self._mop_up(view, i)):
                    break
                self._head_checked[i] = False
                continue
            leg = q[0]
            if leg[0] == "dock":
                if st.worker_energy[i] / en.capacity >= en.exhausted_threshold + 0.05:
                    # scheduled recharge reached with a healthy battery: the
                    # plan accounting was conservative, keep covering and let
                    # the runtime guard decide when to actually head home
                    q.popleft()
                    self._returning[i] = False
                    self._head_checked[i] = False
                    continue
                self._returning[i] = True
                j = leg[1]
                if j is None:
                    j = min(
                        range(len(st.station_pose)),
                        key=lambda s: math.hypot(st.station_pose[s, 0] - pose[0], st.station_pose[s, 1] - pose[1]),
                    )
                station_xy = st.station_pose[j, :2]
                # per-worker slot on the rendezvous ring: several workers can
                # sit inside the epsilon disc and recharge at the same time
                theta = 2.0 * math.pi * i / max(1, len(st.worker_pose))
                ring = max(0.8 * en.rendezvous_radius, 2.2 * (lim.body_radius + sc.station_limits.body_radius))
                ring = min(ring, 0.85 * en.rendezvous_radius)
                slot = (
                    float(station_xy[0]) + ring * math.cos(theta),
                    float(station_xy[1]) + ring * math.sin(theta),
                )
                current_target = slot
                if math.hypot(slot[0] - pose[0], slot[1] - pose[1]) <= 0.14 * en.rendezvous_radius:
                    action = Action(0.0, 0.0)  # parked inside the rendezvous disc
                    legit_wait = True
                    break
                if self.nav.segment_clear((pose[0], pose[1]), slot):
                    action = steer_to(pose, slot, lim, sc.dt)
                    break
                try:
                    hops = route(self.nav, (pose[0], pose[1]), slot)
                except DisconnectedAreaError:
                    q.popleft()  # station unreachable on the grid; fall through
                    self._returning[i] = False
                    continue
                for hop in reversed(hops[:-1]):
                    q.appendleft(("goto", hop))
                self._head_checked[i] = True
                if q[0][0] == "dock":
                    action = steer_to(pose, slot, lim, sc.dt)
                    break
                continue
            target = leg[1]
            tol = self.arrive_tol if leg[0] == "cover" else self._goto_tol()
            d_target = math.hypot(target[0] - pose[0], target[1] - pose[1])
            if d_target <= tol:
                q.popleft()
                self._head_checked[i] = False
                continue
            body_stop = 2.0 * (lim.body_radius + max(lim.body_radius, sc.station_limits.body_radius))
            if d_target <= body_stop + tol and _static_occupant(view, target, body_stop):
                # the waypoint sits under a parked robot: approach to the rim
                # of its exclusion zone instead, close enough for the sweep
                # disc to still take the cell
                q.popleft()
                self._head_checked[i] = False
                rim = body_stop + 0.15
                if d_target > 1e-9 and rim + self._goto_tol() < lim.cover_radius:
                    ux = (pose[0] - target[0]) / d_target
                    uy = (pose[1] - target[1]) / d_target
                    p_rim = (target[0] + ux * rim, target[1] + uy * rim)
                    if self.grid.is_free(*self.grid.index_of(p_rim)):
                        q.appendleft(("goto", p_rim))
                continue
            if not self._head_checked[i]:
                if not self._ensure_head_route(q, pose, i):
                    continue
                self._head_checked[i] = True
                continue
            current_target = (float(q[0][1][0]), float(q[0][1][1]))
            action = steer_to(pose, current_target, lim, sc.dt)
            break

        if current_target is not None and not legit_wait:
            action = deflect_right(action, pose, current_target, lim, sc.dt, stuck)
        if len(st.intf_pose):
            stop = 2.0 * (lim.body_radius + sc.interferer.body_radius)
            action = wait_and_move(action, pose, st.intf_pose[:, :2], lim, sc.dt, stop)
        self._stuck.note_intent(i, action.u_v > 0.0)
        return action


class HoldStationPolicy(Policy):
    """Static stations: hold the spawn pose."""

    role = "station"

    def act(self, view: WorldView, index: int) -> Action:
        return Action(0.0, 0.0)


class StationRouter:
    """Cached clearance-safe waypoints for a station chasing moving targets."""

    def __init__(self, nav, n: int):
        self.nav = nav
        self.paths: list[deque] = [deque() for _ in range(n)]
        self.goals: list[tuple[float, float] | None] = [None] * n

    def aim(self, index: int, pose, target) -> tuple[float, float]:
        goal = self.goals[index]
        if goal is None or math.hypot(goal[0] - target[0], goal[1] - target[1]) > 2.0:
            try:
                hops = route(self.nav, (pose[0], pose[1]), target) if not self.nav.segment_clear(
                    (pose[0], pose[1]), target
                ) else [tuple(target)]
            except DisconnectedAreaError:
                hops = [tuple(target)]
            self.paths[index] = deque(hops)
            self.goals[index] = (float(target[0]), float(target[1]))
        path = self.paths[index]
        while len(path) > 1 and math.hypot(path[0][0] - pose[0], path[0][1] - pose[1]) <= 0.5:
            path.popleft()
        return path[0] if path else (float(target[0]), float(target[1]))


class NearestExhaustedStationPolicy(Policy):
    """Mobile-BCD stations: chase the nearest exhausted worker."""

    role = "station"

    def prepare(self, scenario, grid, state, coverage, seed):
        self._stuck = StuckTracker(scenario.num_stations)
        self._router = StationRouter(
            make_nav(grid, scenario.obstacles, scenario.station_limits.body_radius), scenario.num_stations
        )

    def act(self, view: WorldView, index: int) -> Action:
        sc = view.scenario
        st = view.state
        en = sc.energy
        pose = st.station_pose[index]
        stuck = self._stuck.update(index, pose)
        target = _nearest_exhausted_xy(view, pose)
        if target is None:
            action = Action(0.0, 0.0)
        else:
            aim = self._router.aim(index, pose, target)
            close = math.hypot(target[0] - pose[0], target[1] - pose[1])
            stop_at = 0.7 * en.rendezvous_radius if aim == tuple(target) or close < 2.0 * en.rendezvous_radius else 0.0
            action = steer_to(pose, aim, sc.station_limits, sc.dt, stop_at=stop_at)
            action = deflect_right(action, pose, aim, sc.station_limits, sc.dt, stuck)
        if len(st.intf_pose):
            stop = 2.0 * (sc.station_limits.body_radius + sc.interferer.body_radius)
            action = wait_and_move(action, pose, st.intf_pose[:, :2], sc.station_limits, sc.dt, stop)
        self._stuck.note_intent(index, action.u_v > 0.0)
        return action


class RegionTourStationPolicy(Policy):
    """Mobile-MSTC* stations: park at each region centroid until it is covered."""

    role = "station"

    def __init__(self, slot: PlanSlot):
        self._slot = slot

    def prepare(self, scenario, grid, state, coverage, seed):
        plan = self._slot.get(scenario, grid)
        self.queues = [deque(entries) for entries in plan.station_plan]
        self._stuck = StuckTracker(scenario.num_stations)
        self._router = StationRouter(
            make_nav(grid, scenario.obstacles, scenario.station_limits.body_radius), scenario.num_stations
        )

    def act(self, view: WorldView, index: int) -> Action:
        sc = view.scenario
        st = view.state
        q = self.queues[index]
        pose = st.station_pose[index]
        stuck = self._stuck.update(index, pose)
        while q and q[0][0] == "region" and bool(view.coverage.covered.flat[np.array(q[0][3], dtype=np.int64)].all()):
            q.popleft()
        target = None
        if not q:
            action = Action(0.0, 0.0)
        else:
            target = q[0][2] if q[0][0] == "region" else q[0][1]
            if math.hypot(target[0] - pose[0], target[1] - pose[1]) <= 0.5 * sc.raster_resolution:
                action = Action(0.0, 0.0)
            else:
                aim = self._router.aim(index, pose, target)
                action = steer_to(pose, aim, sc.station_limits, sc.dt)
                action = deflect_right(action, pose, aim, sc.station_limits, sc.dt, stuck)
        if len(st.intf_pose):
            stop = 2.0 * (sc.station_limits.body_radius + sc.interferer.body_radius)
            action = wait_and_move(action, pose, st.intf_pose[:, :2], sc.station_limits, sc.dt, stop)
        self._stuck.note_intent(index, action.u_v > 0.0)
        return action


PLANNER_NAMES = ("mobile-bcd", "static-mstc", "mobile-mstc")


def make_planner(name: str) -> tuple[Policy, Policy]:
    """Fresh (worker_policy, station_policy) pair for a named baseline."""
    if name == "mobile-bcd":
        slot = PlanSlot(mobile_bcd_plan)
        return PlanWorkerPolicy(slot), NearestExhaustedStationPolicy()
    if name == "static-mstc":
        slot = PlanSlot(static_mstc_plan)
        return PlanWorkerPolicy(slot), HoldStationPolicy()
    if name == "mobile-mstc":
        slot = PlanSlot(mobile_mstc_star)
        return PlanWorkerPolicy(slot), RegionTourStationPolicy(slot)
    raise ValueError(f"unknown planner {name!r}; expected one of {PLANNER_NAMES}")
