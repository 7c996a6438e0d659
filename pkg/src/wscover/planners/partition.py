"""Spatial partitioning of the free cells for station rendezvous planning."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..world import CellGrid, Scenario
from .nav import InfeasiblePlanError


class DisconnectedPartitionError(InfeasiblePlanError):
    """Region adjacency graph does not connect all regions of interest."""


@dataclass(frozen=True)
class RegionPartition:
    k: int
    cells: np.ndarray  # (N, 2) grid indices of free cells, row-major order
    assignment: np.ndarray  # (N,) region id per free cell
    centroids: np.ndarray  # (k, 2) world coordinates
    adjacency: dict  # region id -> sorted tuple of neighbor ids

    def region_cells(self, region: int) -> np.ndarray:
        return self.cells[self.assignment == region]


def kmeans_partition(points: np.ndarray, k: int, seed: int, max_iter: int = 100):
    """Lloyd iterations with greedy farthest-point initialization.

    Deterministic for fixed (points, k, seed): the first center is drawn from
    the seeded generator, the rest maximize distance to the chosen set (ties
    to the lowest index); assignment ties go to the lowest centroid index.
    Returns (assignment, centroids).
    """
    pts = np.asarray(points, dtype=float)
    n = len(pts)
    if not (1 <= k <= n):
        raise ValueError(f"k must be in [1, {n}], got {k}")
    rng = np.random.default_rng(seed)
    chosen = [int(rng.integers(n))]
    d2 = ((pts - pts[chosen[0]]) ** 2).sum(axis=1)
    while len(chosen) < k:
        nxt = int(np.argmax(d2))
        chosen.append(nxt)
        d2 = np.minimum(d2, ((pts - pts[nxt]) ** 2).sum(axis=1))
    centroids = pts[chosen].copy()
    assignment = None
    for _it in range(max_iter):
        dist = ((pts[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
        new_assignment = np.argmin(dist, axis=1)
        for r in range(k):
            members = pts[new_assignment == r]
            if len(members):
                centroids[r] = members.mean(axis=0)
        if assignment is not None and np.array_equal(new_assignment, assignment):
            break
        assignment = new_assignment
    return assignment, centroids


def partition_free_cells(grid: CellGrid, k: int, seed: int) -> RegionPartition:
    """k-means over the free cell centers plus the region adjacency graph."""
    cells = np.argwhere(grid.free_mask)
    centers = np.stack(
        [
            grid.origin[0] + (cells[:, 0] + 0.5) * grid.resolution,
            grid.origin[1] + (cells[:, 1] + 0.5) * grid.resolution,
        ],
        axis=1,
    )
    assignment, centroids = kmeans_partition(centers, k, seed)
    label = np.full((grid.width, grid.height), -1, dtype=np.int64)
    label[cells[:, 0], cells[:, 1]] = assignment
    adjacency: dict[int, set[int]] = {r: set() for r in range(k)}
    h_pairs = (label[:-1, :] >= 0) & (label[1:, :] >= 0) & (label[:-1, :] != label[1:, :])
    for a, b in zip(label[:-1, :][h_pairs], label[1:, :][h_pairs]):
        adjacency[int(a)].add(int(b))
        adjacency[int(b)].add(int(a))
    v_pairs = (label[:, :-1] >= 0) & (label[:, 1:] >= 0) & (label[:, :-1] != label[:, 1:])
    for a, b in zip(label[:, :-1][v_pairs], label[:, 1:][v_pairs]):
        adjacency[int(a)].add(int(b))
        adjacency[int(b)].add(int(a))
    return RegionPartition(
        k=k,
        cells=cells,
        assignment=assignment,
        centroids=centroids,
        adjacency={r: tuple(sorted(v)) for r, v in adjacency.items()},
    )


def dfs_region_tour(partition: RegionPartition, start_region: int, allowed=None) -> list[int]:
    """DFS preorder over regions, neighbors in ascending centroid distance.

    Ties break on the lower region id. Raises DisconnectedPartitionError when
    the (induced) adjacency graph does not reach every region.
    """
    regions = set(range(partition.k)) if allowed is None else set(allowed)
    if start_region not in regions:
        raise ValueError(f"start region {start_region} not in the allowed set")
    order: list[int] = []
    seen: set[int] = set()
    stack = [start_region]
    while stack:
        cur = stack.pop()
        if cur in seen:
            continue
        seen.add(cur)
        order.append(cur)
        here = partition.centroids[cur]
        neigh = [r for r in partition.adjacency[cur] if r in regions and r not in seen]
        neigh.sort(
            key=lambda r: (float(np.hypot(*(partition.centroids[r] - here))), r),
            reverse=True,
        )
        stack.extend(neigh)
    if seen != regions:
        raise DisconnectedPartitionError(f"regions {sorted(regions - seen)} unreachable from {start_region}")
    return order


def choose_region_count(free_count: int, scenario: Scenario) -> int:
    """Region count from the energy capacity: one region per full-charge work quantum.

    Uses a serpentine throughput estimate (cells swept per step at full speed
    with lanes 2 * cover_radius apart) against the usable steps of one charge.
    """
    lim = scenario.worker_limits
    en = scenario.energy
    cells_per_step = 2.0 * lim.cover_radius * lim.v_max * scenario.dt / scenario.raster_resolution**2
    steps_per_cell = 1.0 / cells_per_step
    charge_steps = (1.0 - en.exhausted_threshold) * en.capacity / en.e_discharge
    k = math.ceil(free_count * steps_per_cell / charge_steps)
    return max(1, min(k, free_count))
