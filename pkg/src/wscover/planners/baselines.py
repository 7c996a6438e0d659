"""Offline plan builders for the three classical baselines."""

from __future__ import annotations

import math

import numpy as np

from ..world import CellGrid, Pose, Scenario
from .bcd import allocate_lanes, bcd_decompose, cell_lanes
from .nav import make_nav
from .partition import (
    RegionPartition,
    choose_region_count,
    dfs_region_tour,
    DisconnectedPartitionError,
    partition_free_cells,
)
from .stc import CoveragePlan, static_mstc_star


def mobile_bcd_plan(scenario: Scenario, grid: CellGrid) -> CoveragePlan:
    """Boustrophedon lanes over the BCD cells, balanced across workers.

    Stations are reactive under this baseline (chase the nearest exhausted
    worker), so the station schedule is a plain park entry.
    """
    lane_width = 2.0 * scenario.worker_limits.cover_radius
    lanes = []
    for cell in bcd_decompose(grid):
        lanes.extend(cell_lanes(cell, grid, lane_width))
    groups = allocate_lanes(lanes, scenario.num_workers)
    worker_legs: list[list[tuple]] = []
    for i, group in enumerate(groups):
        pos = (scenario.worker_poses[i].x, scenario.worker_poses[i].y)
        legs: list[tuple] = []
        for lane in group:
            lo, hi = lane.endpoints()
            d_lo = math.hypot(lo[0] - pos[0], lo[1] - pos[1])
            d_hi = math.hypot(hi[0] - pos[0], hi[1] - pos[1])
            enter, leave = (lo, hi) if d_lo <= d_hi else (hi, lo)
            legs.append(("goto", enter))
            if leave != enter:
                legs.append(("cover", leave))
            pos = leave
        worker_legs.append(legs)
    station_plan = [[("park", (p.x, p.y))] for p in scenario.station_poses]
    return CoveragePlan(
        worker_legs=worker_legs,
        station_plan=station_plan,
        meta={"planner": "mobile-bcd", "arrive_tol": 0.5 * scenario.worker_limits.cover_radius},
    )


def static_mstc_plan(scenario: Scenario, grid: CellGrid) -> CoveragePlan:
    """Whole-map MSTC* split with every station parked at its initial pose."""
    nav = make_nav(grid, scenario.obstacles, scenario.worker_limits.body_radius)
    plan = static_mstc_star(
        grid,
        scenario.num_workers,
        scenario.station_poses[0],
        scenario.energy,
        scenario.worker_limits,
        scenario.dt,
        nav=nav,
        dock_station=None,
    )
    plan.station_plan = [[("park", (p.x, p.y))] for p in scenario.station_poses]
    return plan


# ---------------------------------------------------------------------------
# mobile-MSTC*: k-means regions, DFS station tours, per-region MSTC*
# ---------------------------------------------------------------------------


def _split_into_components(grid: CellGrid, part: RegionPartition) -> RegionPartition:
    """Refine regions into 4-connected components so each is coverable in one visit."""
    label = np.full((grid.width, grid.height), -1, dtype=np.int64)
    label[part.cells[:, 0], part.cells[:, 1]] = part.assignment
    comp = np.full_like(label, -1)
    next_id = 0
    for sx, sy in part.cells:
        if comp[sx, sy] >= 0:
            continue
        rid = label[sx, sy]
        stack = [(int(sx), int(sy))]
        comp[sx, sy] = next_id
        while stack:
            x, y = stack.pop()
            for nx, ny in ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)):
                if (
                    0 <= nx < grid.width
                    and 0 <= ny < grid.height
                    and comp[nx, ny] < 0
                    and label[nx, ny] == rid
                ):
                    comp[nx, ny] = next_id
                    stack.append((nx, ny))
        next_id += 1
    assignment = comp[part.cells[:, 0], part.cells[:, 1]]
    centroids = np.zeros((next_id, 2))
    res = grid.resolution
    for r in range(next_id):
        cells = part.cells[assignment == r]
        centroids[r] = (
            grid.origin[0] + (cells[:, 0].mean() + 0.5) * res,
            grid.origin[1] + (cells[:, 1].mean() + 0.5) * res,
        )
    adjacency: dict[int, set[int]] = {r: set() for r in range(next_id)}
    h_pairs = (comp[:-1, :] >= 0) & (comp[1:, :] >= 0) & (comp[:-1, :] != comp[1:, :])
    for a, b in zip(comp[:-1, :][h_pairs], comp[1:, :][h_pairs]):
        adjacency[int(a)].add(int(b))
        adjacency[int(b)].add(int(a))
    v_pairs = (comp[:, :-1] >= 0) & (comp[:, 1:] >= 0) & (comp[:, :-1] != comp[:, 1:])
    for a, b in zip(comp[:, :-1][v_pairs], comp[:, 1:][v_pairs]):
        adjacency[int(a)].add(int(b))
        adjacency[int(b)].add(int(a))
    return RegionPartition(
        k=next_id,
        cells=part.cells,
        assignment=assignment,
        centroids=centroids,
        adjacency={r: tuple(sorted(v)) for r, v in adjacency.items()},
    )


def _order_regions(part: RegionPartition, subset: set[int], start: int) -> list[int]:
    try:
        return dfs_region_tour(part, start, allowed=subset)
    except DisconnectedPartitionError:
        # induced subgraph splits: fall back to a nearest-unvisited chain
        order = [start]
        left = set(subset) - {start}
        cur = start
        while left:
            nxt = min(left, key=lambda r: (float(np.hypot(*(part.centroids[r] - part.centroids[cur]))), r))
            order.append(nxt)
            left.discard(nxt)
            cur = nxt
        return order


def _region_grid(grid: CellGrid, cells: np.ndarray) -> CellGrid:
    blocked = np.ones((grid.width, grid.height), dtype=bool)
    blocked[cells[:, 0], cells[:, 1]] = False
    return CellGrid(grid.width, grid.height, grid.origin, grid.resolution, blocked)


def _park_point(grid: CellGrid, cells: np.ndarray, centroid) -> tuple[float, float]:
    cx = grid.origin[0] + (cells[:, 0] + 0.5) * grid.resolution
    cy = grid.origin[1] + (cells[:, 1] + 0.5) * grid.resolution
    d = (cx - centroid[0]) ** 2 + (cy - centroid[1]) ** 2
    best = int(np.argmin(d))
    return (float(cx[best]), float(cy[best]))


def mobile_mstc_star(scenario: Scenario, grid: CellGrid) -> CoveragePlan:
    """k-means sub-regions toured depth-first, covered via per-region MSTC*.

    Regions are sized from the workers' energy capacity, split among stations
    by proximity (balanced), and each station parks at the region's snapped
    centroid while its worker group runs the region's coverage segments.
    Docked workers ride the station between regions.
    """
    m, n = scenario.num_workers, scenario.num_stations
    nav = make_nav(grid, scenario.obstacles, scenario.worker_limits.body_radius)
    k = choose_region_count(grid.free_count, scenario)
    part = _split_into_components(grid, partition_free_cells(grid, k, scenario.seed))
    station_xy = [(p.x, p.y) for p in scenario.station_poses]

    cap = math.ceil(part.k / n)
    loads = [0] * n
    region_owner: dict[int, int] = {}
    order = sorted(
        range(part.k),
        key=lambda r: (min(math.hypot(part.centroids[r][0] - sx, part.centroids[r][1] - sy) for sx, sy in station_xy), r),
    )
    for r in order:
        prefs = sorted(
            range(n),
            key=lambda j: (math.hypot(part.centroids[r][0] - station_xy[j][0], part.centroids[r][1] - station_xy[j][1]), j),
        )
        for j in prefs:
            if loads[j] < cap:
                region_owner[r] = j
                loads[j] += 1
                break

    groups = [list(range(j * m // n, (j + 1) * m // n)) for j in range(n)]
    worker_legs: list[list[tuple]] = [[] for _ in range(m)]
    station_plan: list[list[tuple]] = [[] for _ in range(n)]
    for j in range(n):
        mine = sorted(r for r, owner in region_owner.items() if owner == j)
        if not mine:
            station_plan[j].append(("park", station_xy[j]))
            continue
        start = min(
            mine,
            key=lambda r: (math.hypot(part.centroids[r][0] - station_xy[j][0], part.centroids[r][1] - station_xy[j][1]), r),
        )
        for rid in _order_regions(part, set(mine), start):
            cells = part.region_cells(rid)
            if len(cells) == 0:
                continue
            park = _park_point(grid, cells, part.centroids[rid])
            flat = tuple(int(ix) * grid.height + int(iy) for ix, iy in cells)
            station_plan[j].append(("region", rid, park, flat))
            if not groups[j]:
                continue
            sub_plan = static_mstc_star(
                _region_grid(grid, cells),
                len(groups[j]),
                Pose(park[0], park[1]),
                scenario.energy,
                scenario.worker_limits,
                scenario.dt,
                nav=nav,
                dock_station=j,
            )
            for gi, wid in enumerate(groups[j]):
                worker_legs[wid].extend(sub_plan.worker_legs[gi])
    return CoveragePlan(
        worker_legs=worker_legs,
        station_plan=station_plan,
        meta={"planner": "mobile-mstc", "arrive_tol": 0.25 * scenario.worker_limits.cover_radius},
    )
