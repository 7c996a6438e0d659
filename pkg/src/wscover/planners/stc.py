"""Spanning-tree coverage over mega-cells and the MSTC*-style coverage plans.

Mega-cells are 2*cover_radius squares holding four cover_radius sub-cells. A
minimum spanning tree (unit weights, deterministic index tie-break) over the
free mega-cells is circumnavigated, producing a closed cycle that visits each
sub-cell exactly once on obstacle-free maps. Sub-cells without free raster
cells are dropped from the waypoint cycle and the gaps routed around
obstacles.

The plan layer splits the cycle into per-worker segments balanced by length
and interleaves recharge legs wherever the travel-time energy budget of one
charge would otherwise be exceeded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..world import CellGrid, EnergyParams, KinematicLimits, Pose, Scenario
from .nav import DisconnectedAreaError, InfeasiblePlanError, NavContext, distance_field, make_nav, route

# fraction of one charge's travel-time budget the planner is willing to commit
ENERGY_SAFETY = 0.8


@dataclass
class CoveragePlan:
    """Offline itinerary: tagged waypoint legs per worker plus station schedule.

    Worker legs are ("goto", (x, y)), ("cover", (x, y)) or ("dock", station)
    where station is an index or None for nearest-at-runtime. Station entries
    are ("park", (x, y)) or ("region", region_id, (x, y), flat_cell_indices).
    """

    worker_legs: list[list[tuple]]
    station_plan: list[list[tuple]]
    meta: dict = field(default_factory=dict)

    def recharge_legs(self, worker: int | None = None) -> int:
        groups = self.worker_legs if worker is None else [self.worker_legs[worker]]
        return sum(1 for legs in groups for leg in legs if leg[0] == "dock")

    def export_waypoints(self) -> str:
        lines: list[str] = []
        for i, legs in enumerate(self.worker_legs):
            lines.append(f"# worker {i}")
            for leg in legs:
                if leg[0] == "dock":
                    target = "nearest" if leg[1] is None else str(leg[1])
                    lines.append(f"dock station={target}")
                else:
                    lines.append(f"{leg[1][0]:.3f} {leg[1][1]:.3f}")
        for j, entries in enumerate(self.station_plan):
            lines.append(f"# station {j}")
            for entry in entries:
                lines.append(f"{entry[1][0]:.3f} {entry[1][1]:.3f}" if entry[0] == "park" else f"region {entry[1]}")
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# sub-cell / mega-cell structure
# ---------------------------------------------------------------------------


class _SubGrid:
    def __init__(self, grid: CellGrid, cover_radius: float):
        self.r = cover_radius
        w = grid.width * grid.resolution
        h = grid.height * grid.resolution
        self.nsx = max(1, math.ceil(w / cover_radius - 1e-9))
        self.nsy = max(1, math.ceil(h / cover_radius - 1e-9))
        counts = np.zeros((self.nsx, self.nsy), dtype=np.int64)
        sx_sum = np.zeros((self.nsx, self.nsy))
        sy_sum = np.zeros((self.nsx, self.nsy))
        free_cells = np.argwhere(grid.free_mask)
        cx = grid.origin[0] + (free_cells[:, 0] + 0.5) * grid.resolution
        cy = grid.origin[1] + (free_cells[:, 1] + 0.5) * grid.resolution
        sx = np.clip((cx / cover_radius).astype(int), 0, self.nsx - 1)
        sy = np.clip((cy / cover_radius).astype(int), 0, self.nsy - 1)
        np.add.at(counts, (sx, sy), 1)
        np.add.at(sx_sum, (sx, sy), cx)
        np.add.at(sy_sum, (sx, sy), cy)
        self.sub_free = counts > 0
        with np.errstate(invalid="ignore"):
            self.sub_centroid = np.stack(
                [np.where(counts > 0, sx_sum / np.maximum(counts, 1), 0.0),
                 np.where(counts > 0, sy_sum / np.maximum(counts, 1), 0.0)],
                axis=-1,
            )
        self.grid = grid
        self.nmx = math.ceil(self.nsx / 2)
        self.nmy = math.ceil(self.nsy / 2)

    def mega_free(self) -> np.ndarray:
        out = np.zeros((self.nmx, self.nmy), dtype=bool)
        for dx in (0, 1):
            for dy in (0, 1):
                sub = self.sub_free[dx :: 2, dy :: 2]
                out[: sub.shape[0], : sub.shape[1]] |= sub
        return out

    def sub_center(self, sx: int, sy: int) -> tuple[float, float]:
        return ((sx + 0.5) * self.r, (sy + 0.5) * self.r)

    def sub_waypoint(self, sx: int, sy: int) -> tuple[float, float] | None:
        if not self.sub_free[sx, sy]:
            return None
        cx, cy = self.sub_center(sx, sy)
        ix, iy = self.grid.index_of((cx, cy))
        if self.grid.is_free(ix, iy):
            return (cx, cy)
        return tuple(self.sub_centroid[sx, sy])


def _kruskal_tree(free: np.ndarray) -> dict[tuple[int, int], set[tuple[int, int]]]:
    nmx, nmy = free.shape

    def flat(c):
        return c[0] * nmy + c[1]

    edges = []
    for x in range(nmx):
        for y in range(nmy):
            if not free[x, y]:
                continue
            if x + 1 < nmx and free[x + 1, y]:
                edges.append(((x, y), (x + 1, y)))
            if y + 1 < nmy and free[x, y + 1]:
                edges.append(((x, y), (x, y + 1)))
    edges.sort(key=lambda e: (flat(e[0]), flat(e[1])))
    parent: dict = {}

    def find(a):
        while parent.get(a, a) != a:
            parent[a] = parent.get(parent[a], parent[a])
            a = parent[a]
        return a

    adj: dict[tuple[int, int], set[tuple[int, int]]] = {
        (x, y): set() for x in range(nmx) for y in range(nmy) if free[x, y]
    }
    for u, v in edges:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            adj[u].add(v)
            adj[v].add(u)
    return adj


def stc_plan(grid: CellGrid, cover_radius: float, start) -> list[tuple[float, float]]:
    """Circumnavigation waypoint cycle around a spanning tree of mega-cells.

    Raises DisconnectedAreaError when some free mega-cell cannot be reached
    from the start (per-component planning is then required).
    """
    sub = _SubGrid(grid, cover_radius)
    mega_free = sub.mega_free()
    free_megas = np.argwhere(mega_free)
    if len(free_megas) == 0:
        raise InfeasiblePlanError("no free area to cover")

    sx0, sy0 = min(
        max(0, int(float(start[0]) / cover_radius)), sub.nsx - 1
    ), min(max(0, int(float(start[1]) / cover_radius)), sub.nsy - 1)
    start_mega = (sx0 // 2, sy0 // 2)
    if not mega_free[start_mega]:
        d = np.abs(free_megas[:, 0] - start_mega[0]) + np.abs(free_megas[:, 1] - start_mega[1])
        start_mega = tuple(free_megas[int(np.argmin(d))])

    # connectivity check (4-adjacency over free mega-cells)
    seen = {start_mega}
    frontier = [start_mega]
    while frontier:
        x, y = frontier.pop()
        for nx, ny in ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)):
            if 0 <= nx < sub.nmx and 0 <= ny < sub.nmy and mega_free[nx, ny] and (nx, ny) not in seen:
                seen.add((nx, ny))
                frontier.append((nx, ny))
    unreachable = [tuple(c) for c in free_megas if tuple(c) not in seen]
    if unreachable:
        raise DisconnectedAreaError(f"{len(unreachable)} free mega-cells unreachable from {start_mega}")

    tree = _kruskal_tree(mega_free)

    # sub-cell cycle: per-mega 4-cycles with walls opened along tree edges
    def subs_of(mx, my):
        sw = (2 * mx, 2 * my)
        se = (2 * mx + 1, 2 * my)
        ne = (2 * mx + 1, 2 * my + 1)
        nw = (2 * mx, 2 * my + 1)
        return sw, se, ne, nw

    edges: set[frozenset] = set()
    for mx, my in map(tuple, free_megas):
        sw, se, ne, nw = subs_of(mx, my)
        for a, b in ((sw, se), (se, ne), (ne, nw), (nw, sw)):
            edges.add(frozenset((a, b)))
    for (amx, amy), nbrs in tree.items():
        for bmx, bmy in nbrs:
            if (bmx, bmy) < (amx, amy):
                continue
            asw, ase, ane, anw = subs_of(amx, amy)
            bsw, bse, bne, bnw = subs_of(bmx, bmy)
            if bmx == amx + 1:  # east
                edges.discard(frozenset((ase, ane)))
                edges.discard(frozenset((bsw, bnw)))
                edges.add(frozenset((ase, bsw)))
                edges.add(frozenset((ane, bnw)))
            else:  # north
                edges.discard(frozenset((anw, ane)))
                edges.discard(frozenset((bsw, bse)))
                edges.add(frozenset((anw, bsw)))
                edges.add(frozenset((ane, bse)))

    neighbors: dict[tuple[int, int], list[tuple[int, int]]] = {}
    for e in edges:
        a, b = tuple(e)
        neighbors.setdefault(a, []).append(b)
        neighbors.setdefault(b, []).append(a)

    start_subs = sorted(s for s in subs_of(*start_mega) if s in neighbors)
    sp = (float(start[0]), float(start[1]))
    start_sub = min(
        start_subs,
        key=lambda s: ((sub.sub_center(*s)[0] - sp[0]) ** 2 + (sub.sub_center(*s)[1] - sp[1]) ** 2, s),
    )
    cycle_subs = [start_sub]
    prev, cur = start_sub, min(neighbors[start_sub])
    while cur != start_sub:
        cycle_subs.append(cur)
        nxt = [n for n in neighbors[cur] if n != prev]
        prev, cur = cur, min(nxt)

    waypoints: list[tuple[float, float]] = []
    for s in cycle_subs:
        if 0 <= s[0] < sub.nsx and 0 <= s[1] < sub.nsy:
            wp = sub.sub_waypoint(*s)
            if wp is not None:
                waypoints.append(wp)
    if not waypoints:
        raise InfeasiblePlanError("coverage cycle holds no reachable waypoints")
    return waypoints


# ---------------------------------------------------------------------------
# plan-time energy accounting
# ---------------------------------------------------------------------------


def _usable_steps(energy: EnergyParams) -> float:
    return (1.0 - energy.exhausted_threshold) * energy.capacity / energy.e_discharge * ENERGY_SAFETY


def _build_itinerary(
    segment: list[tuple[float, float]],
    station_xy: tuple[float, float],
    nav: NavContext,
    home_steps: np.ndarray,
    limits: KinematicLimits,
    energy: EnergyParams,
    dt: float,
    dock_station: int | None,
    budget_scale: float = 1.0,
) -> list[tuple]:
    """Coverage legs interleaved with recharge legs under travel-time accounting.

    `home_steps` is the geodesic distance field (cell counts) back to the
    station; using it keeps the return-leg budget honest around obstacles.
    `budget_scale` staggers recharge times across a team so that workers do
    not all converge on the station at once.
    """
    if not segment:
        return []
    speed = limits.v_max * dt
    res = nav.grid.resolution
    usable = _usable_steps(energy) * budget_scale
    legs: list[tuple] = []
    acc = 0.0
    pos = station_xy
    first = True

    def routed_steps(src, dst):
        hops = route(nav, src, dst)
        d = 0.0
        p = src
        for hop in hops:
            d += math.hypot(hop[0] - p[0], hop[1] - p[1]) / speed
            p = hop
        return hops, d

    def return_steps(wp) -> float:
        ix, iy = nav.grid.index_of(wp)
        ix = min(max(ix, 0), nav.grid.width - 1)
        iy = min(max(iy, 0), nav.grid.height - 1)
        cells = home_steps[ix, iy]
        if not math.isfinite(cells):
            return math.hypot(wp[0] - station_xy[0], wp[1] - station_xy[1]) / speed
        return cells * res / speed

    for wp in segment:
        hops, d = routed_steps(pos, wp)
        if not first and acc + d + return_steps(wp) > usable:
            legs.append(("dock", dock_station))
            acc = 0.0
            hops, d = routed_steps(station_xy, wp)
        for hop in hops[:-1]:
            legs.append(("goto", hop))
        legs.append(("cover", hops[-1]))
        acc += d
        pos = wp
        first = False
    return legs


def _split_cycle(cycle: list[tuple[float, float]], m: int) -> list[list[tuple[float, float]]]:
    """Contiguous segments of the cycle with near-equal polyline length."""
    if m == 1:
        return [list(cycle)]
    seg_len = [0.0]
    for a, b in zip(cycle, cycle[1:]):
        seg_len.append(seg_len[-1] + math.hypot(b[0] - a[0], b[1] - a[1]))
    total = seg_len[-1] or 1.0
    bounds = [0]
    for w in range(1, m):
        target = total * w / m
        idx = int(np.searchsorted(seg_len, target))
        idx = max(bounds[-1] + 1, min(idx, len(cycle) - (m - w)))
        bounds.append(idx)
    bounds.append(len(cycle))
    out = []
    for a, b in zip(bounds, bounds[1:]):
        out.append(list(cycle[a:b]))
    return out


def static_mstc_star(
    grid: CellGrid,
    num_workers: int,
    station_pose: Pose,
    energy: EnergyParams,
    limits: KinematicLimits,
    dt: float,
    nav: NavContext | None = None,
    dock_station: int | None = None,
) -> CoveragePlan:
    """Split one coverage cycle among workers around a fixed station.

    Every leg pair (coverage so far plus the return to the station) must fit
    in the travel-time budget of one charge; otherwise a recharge leg is
    scheduled. Raises InfeasiblePlanError when some waypoint cannot be reached
    and returned from within a full charge.
    """
    if nav is None:
        nav = make_nav(grid, (), limits.body_radius)
    station_xy = (station_pose.x, station_pose.y)
    cycle = stc_plan(grid, limits.cover_radius, station_xy)
    speed = limits.v_max * dt
    usable = _usable_steps(energy)
    home_steps = distance_field(nav, station_xy)

    def wp_home_steps(wp) -> float:
        ix, iy = nav.grid.index_of(wp)
        ix = min(max(ix, 0), nav.grid.width - 1)
        iy = min(max(iy, 0), nav.grid.height - 1)
        cells = home_steps[ix, iy]
        if not math.isfinite(cells):
            return math.hypot(wp[0] - station_xy[0], wp[1] - station_xy[1]) / speed
        return cells * nav.grid.resolution / speed

    worst = max(wp_home_steps(wp) for wp in cycle)
    if 2.0 * worst > usable:
        raise InfeasiblePlanError(
            f"cell {worst:.0f} travel-steps out exceeds the round-trip budget of one charge"
        )
    if num_workers < 1:
        raise InfeasiblePlanError("need at least one worker")
    segments = _split_cycle(cycle, min(num_workers, len(cycle)))
    while len(segments) < num_workers:
        segments.append([])
    worker_legs = [
        _build_itinerary(
            seg,
            station_xy,
            nav,
            home_steps,
            limits,
            energy,
            dt,
            dock_station,
            budget_scale=0.6 + 0.4 * (i + 1) / max(1, num_workers),
        )
        for i, seg in enumerate(segments)
    ]
    return CoveragePlan(
        worker_legs=worker_legs,
        station_plan=[[("park", station_xy)]],
        meta={"planner": "static-mstc", "arrive_tol": 0.25 * limits.cover_radius},
    )
