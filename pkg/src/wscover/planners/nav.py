"""Grid routing helpers shared by the baseline planners.

Navigation must respect the robot body: a straight segment is traversable
only when every sample point keeps `clearance` distance from all obstacle
edges and the map boundary. A* runs on an inflated blocked mask and the
line-of-sight shortcutting re-validates segments with the exact disc test.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np

from ..dynamics import ObstacleGeometry, obstacle_geometry
from ..world import CellGrid


class InfeasiblePlanError(RuntimeError):
    """A coverage plan cannot satisfy reachability or energy constraints."""


class DisconnectedAreaError(InfeasiblePlanError):
    """Free space splits into components unreachable from the start."""


@dataclass(frozen=True, eq=False)
class NavContext:
    """A cell grid plus obstacle geometry and a body clearance radius."""

    grid: CellGrid
    geometry: ObstacleGeometry
    clearance: float
    bounds: tuple[float, float]
    nav_blocked: np.ndarray  # grid blocked mask inflated by the clearance

    @classmethod
    def build(cls, grid: CellGrid, obstacles: tuple, clearance: float) -> "NavContext":
        geometry = obstacle_geometry(obstacles)
        w = grid.width * grid.resolution + grid.origin[0]
        h = grid.height * grid.resolution + grid.origin[1]
        centers = grid.centers().reshape(-1, 2)
        blocked = grid.blocked.copy().reshape(-1)
        if geometry.num_polys:
            blocked |= geometry.min_edge_distance(centers) < clearance
        blocked |= (
            (centers[:, 0] < clearance)
            | (centers[:, 0] > w - clearance)
            | (centers[:, 1] < clearance)
            | (centers[:, 1] > h - clearance)
        )
        return cls(
            grid=grid,
            geometry=geometry,
            clearance=clearance,
            bounds=(w, h),
            nav_blocked=blocked.reshape(grid.width, grid.height),
        )

    def segment_clear(self, a, b) -> bool:
        """Exact disc-swept test: sample points keep clearance from everything.

        The first ~0.6 cell of the segment is exempt from the clearance test:
        a robot that legally sits right at the clearance boundary must still
        be able to route away from it.
        """
        ax, ay = float(a[0]), float(a[1])
        bx, by = float(b[0]), float(b[1])
        length = math.hypot(bx - ax, by - ay)
        res = self.grid.resolution
        n = max(2, int(length / (res * 0.25)) + 1)
        t = np.linspace(0.0, 1.0, n + 1)
        pts = np.stack([ax + t * (bx - ax), ay + t * (by - ay)], axis=1)
        grid = self.grid
        ix = np.floor((pts[:, 0] - grid.origin[0]) / res).astype(int)
        iy = np.floor((pts[:, 1] - grid.origin[1]) / res).astype(int)
        ix = np.clip(ix, 0, grid.width - 1)
        iy = np.clip(iy, 0, grid.height - 1)
        if grid.blocked[ix, iy].any():
            return False
        far = t * length > 0.6 * res
        if not far.any():
            return True
        fpts = pts[far]
        clr = self.clearance
        w, h = self.bounds
        if ((fpts[:, 0] < clr) | (fpts[:, 0] > w - clr) | (fpts[:, 1] < clr) | (fpts[:, 1] > h - clr)).any():
            return False
        if self.geometry.num_polys == 0:
            return True
        if self.geometry.inside_any(fpts).any():
            return False
        return bool((self.geometry.min_edge_distance(fpts) >= clr).all())


def make_nav(grid: CellGrid, obstacles: tuple, body_radius: float) -> NavContext:
    return NavContext.build(grid, obstacles, body_radius + 0.1 * grid.resolution)


def nearest_free_cell(grid: CellGrid, p, blocked: np.ndarray | None = None) -> tuple[int, int]:
    mask = grid.blocked if blocked is None else blocked
    ix, iy = grid.index_of(p)
    ix = min(max(ix, 0), grid.width - 1)
    iy = min(max(iy, 0), grid.height - 1)
    if not mask[ix, iy]:
        return ix, iy
    free = np.argwhere(~mask)
    if len(free) == 0:
        raise DisconnectedAreaError("no navigable cells at all")
    cx = grid.origin[0] + (free[:, 0] + 0.5) * grid.resolution
    cy = grid.origin[1] + (free[:, 1] + 0.5) * grid.resolution
    d = (cx - float(p[0])) ** 2 + (cy - float(p[1])) ** 2
    best = int(np.argmin(d))
    return int(free[best, 0]), int(free[best, 1])


def line_of_sight(nav: NavContext, a, b) -> bool:
    return nav.segment_clear(a, b)


def astar_cells(nav: NavContext, start: tuple[int, int], goal: tuple[int, int]) -> list[tuple[int, int]] | None:
    if start == goal:
        return [start]
    grid = nav.grid
    w, h = grid.width, grid.height
    blocked = nav.nav_blocked
    gscore = {start: 0.0}
    pq = [(0.0, start)]
    came: dict[tuple[int, int], tuple[int, int]] = {}
    while pq:
        f, cur = heapq.heappop(pq)
        if cur == goal:
            path = [cur]
            while cur in came:
                cur = came[cur]
                path.append(cur)
            return path[::-1]
        cx, cy = cur
        base = gscore[cur]
        if f - abs(goal[0] - cx) - abs(goal[1] - cy) > base:
            continue
        for nx, ny in ((cx + 1, cy), (cx - 1, cy), (cx, cy + 1), (cx, cy - 1)):
            if 0 <= nx < w and 0 <= ny < h and not blocked[nx, ny]:
                g = base + 1.0
                if g < gscore.get((nx, ny), math.inf):
                    gscore[(nx, ny)] = g
                    came[(nx, ny)] = cur
                    heapq.heappush(pq, (g + abs(goal[0] - nx) + abs(goal[1] - ny), (nx, ny)))
    return None


def route(nav: NavContext, a, b) -> list[tuple[float, float]]:
    """Clearance-safe waypoints from a to b, pairwise traversable.

    Ends exactly at b when the final approach is clear, else at the nearest
    navigable cell center (callers pop waypoints within a tolerance anyway).
    Raises DisconnectedAreaError when no route exists.
    """
    bx, by = float(b[0]), float(b[1])
    if nav.segment_clear(a, b):
        return [(bx, by)]
    grid = nav.grid
    start = nearest_free_cell(grid, a, nav.nav_blocked)
    goal = nearest_free_cell(grid, b, nav.nav_blocked)
    cells = astar_cells(nav, start, goal)
    if cells is None:
        raise DisconnectedAreaError(f"no grid route from {tuple(a)} to {tuple(b)}")
    pts = [grid.cell_center(ix, iy) for ix, iy in cells]
    goal_center = pts[-1]
    if nav.segment_clear(goal_center, (bx, by)):
        pts.append((bx, by))
    out: list[tuple[float, float]] = []
    anchor = (float(a[0]), float(a[1]))
    idx = 0
    while idx < len(pts):
        j = len(pts) - 1
        while j > idx and not nav.segment_clear(anchor, pts[j]):
            j -= 1
        anchor = pts[j]
        out.append(anchor)
        idx = j + 1
    # routes must make progress: drop leading hops at the start position
    while out and math.hypot(out[0][0] - float(a[0]), out[0][1] - float(a[1])) <= 0.4 * grid.resolution:
        out.pop(0)
    if not out:
        raise DisconnectedAreaError(f"route from {tuple(a)} to {tuple(b)} makes no progress")
    return out


def distance_field(nav: NavContext, source) -> np.ndarray:
    """Geodesic cell counts (4-connected BFS over navigable cells) from source.

    Unreachable cells hold +inf; multiply by the resolution for a safe
    over-estimate of the free-space path length back to the source.
    """
    grid = nav.grid
    field = np.full((grid.width, grid.height), np.inf)
    sx, sy = nearest_free_cell(grid, source, nav.nav_blocked)
    field[sx, sy] = 0.0
    frontier = [(sx, sy)]
    blocked = nav.nav_blocked
    while frontier:
        nxt = []
        for x, y in frontier:
            d = field[x, y] + 1.0
            for nx, ny in ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)):
                if 0 <= nx < grid.width and 0 <= ny < grid.height and not blocked[nx, ny] and d < field[nx, ny]:
                    field[nx, ny] = d
                    nxt.append((nx, ny))
        frontier = nxt
    return field
