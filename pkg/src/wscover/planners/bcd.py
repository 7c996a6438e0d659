"""Boustrophedon cellular decomposition and serpentine lane generation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..world import CellGrid


@dataclass
class BcdCell:
    """One x-monotone cell: a contiguous column range with one free interval per column."""

    id: int
    col_start: int
    col_end: int  # exclusive
    intervals: list[tuple[int, int]]  # [row_start, row_end) per column
    neighbors: set[int] = field(default_factory=set)

    def cell_count(self) -> int:
        return sum(b - a for a, b in self.intervals)


def _column_intervals(col: np.ndarray) -> list[tuple[int, int]]:
    ivs = []
    start = None
    for r, free in enumerate(col):
        if free and start is None:
            start = r
        elif not free and start is not None:
            ivs.append((start, r))
            start = None
    if start is not None:
        ivs.append((start, len(col)))
    return ivs


def _overlap(a: tuple[int, int], b: tuple[int, int]) -> bool:
    return max(a[0], b[0]) < min(a[1], b[1])


def bcd_decompose(grid: CellGrid) -> list[BcdCell]:
    """Sweep columns left to right, opening/closing cells at connectivity events.

    A cell continues into the next column only on a one-to-one interval
    overlap; splits and merges close the involved cells and open fresh ones,
    so every output cell is x-monotone. Together the cells partition the free
    cells, with adjacency recorded between row-overlapping neighbors.
    """
    free = grid.free_mask
    labels = np.full((grid.width, grid.height), -1, dtype=np.int64)
    cells: list[BcdCell] = []
    prev: list[tuple[int, tuple[int, int]]] = []  # (cell id, interval) active in previous column
    for c in range(grid.width):
        ivs = _column_intervals(free[c, :])
        overlaps = [[k for k, (_, piv) in enumerate(prev) if _overlap(iv, piv)] for iv in ivs]
        hits_per_active = [0] * len(prev)
        for ov in overlaps:
            for k in ov:
                hits_per_active[k] += 1
        current: list[tuple[int, tuple[int, int]]] = []
        for iv, ov in zip(ivs, overlaps):
            if len(ov) == 1 and hits_per_active[ov[0]] == 1:
                cid = prev[ov[0]][0]
                cells[cid].col_end = c + 1
                cells[cid].intervals.append(iv)
            else:
                cid = len(cells)
                cells.append(BcdCell(id=cid, col_start=c, col_end=c + 1, intervals=[iv]))
            labels[c, iv[0] : iv[1]] = cid
            current.append((cid, iv))
        prev = current
    # adjacency from row overlap across column boundaries
    for c in range(grid.width - 1):
        both = free[c, :] & free[c + 1, :]
        for r in np.flatnonzero(both):
            a, b = int(labels[c, r]), int(labels[c + 1, r])
            if a != b:
                cells[a].neighbors.add(b)
                cells[b].neighbors.add(a)
    return cells


@dataclass(frozen=True)
class Lane:
    """One vertical serpentine lane: a segment at fixed x spanning the lane's free extent."""

    x: float
    y_lo: float
    y_hi: float

    @property
    def length(self) -> float:
        return self.y_hi - self.y_lo

    def endpoints(self) -> tuple[tuple[float, float], tuple[float, float]]:
        return (self.x, self.y_lo), (self.x, self.y_hi)


def cell_lanes(cell: BcdCell, grid: CellGrid, lane_width: float) -> list[Lane]:
    """Vertical lanes spaced lane_width over a BCD cell.

    Each lane runs along the free interval of its group's middle column, which
    keeps the segment strictly inside free space even when the cell silhouette
    varies column to column; leftover slivers are picked up by replans.
    """
    res = grid.resolution
    cols_per_lane = max(1, int(round(lane_width / res)))
    lanes: list[Lane] = []
    ncols = cell.col_end - cell.col_start
    for lane_idx in range(math.ceil(ncols / cols_per_lane)):
        lo = lane_idx * cols_per_lane
        hi = min(ncols, lo + cols_per_lane)
        mid = lo + (hi - lo - 1) // 2
        r0, r1 = cell.intervals[mid]
        x = grid.origin[0] + (cell.col_start + mid + 0.5) * res
        y_lo = grid.origin[1] + (r0 + 0.5) * res
        y_hi = grid.origin[1] + (r1 - 0.5) * res
        lanes.append(Lane(float(x), float(y_lo), float(y_hi)))
    return lanes


def boustrophedon_path(cell: BcdCell, grid: CellGrid, lane_width: float | None = None, cover_radius: float | None = None) -> list[tuple[float, float]]:
    """Serpentine waypoints over one cell; lanes default to 2 * cover_radius wide."""
    if lane_width is None:
        if cover_radius is None:
            raise ValueError("need lane_width or cover_radius")
        lane_width = 2.0 * cover_radius
    pts: list[tuple[float, float]] = []
    for idx, lane in enumerate(cell_lanes(cell, grid, lane_width)):
        lo, hi = lane.endpoints()
        pair = (lo, hi) if idx % 2 == 0 else (hi, lo)
        if pair[0] == pair[1]:
            pts.append(pair[0])
        else:
            pts.extend(pair)
    return pts


def allocate_lanes(lanes: list[Lane], num_workers: int) -> list[list[Lane]]:
    """Greedy longest-first assignment balancing total lane length per worker."""
    if num_workers < 1:
        raise ValueError("need at least one worker")
    order = sorted(range(len(lanes)), key=lambda i: (-lanes[i].length, i))
    loads = [0.0] * num_workers
    out: list[list[tuple[int, Lane]]] = [[] for _ in range(num_workers)]
    for i in order:
        w = min(range(num_workers), key=lambda j: (loads[j], j))
        loads[w] += lanes[i].length
        out[w].append((i, lanes[i]))
    # keep each worker's lanes in their original (spatial) order
    return [[lane for _, lane in sorted(group, key=lambda t: t[0])] for group in out]
