"""Covered-area bookkeeping: per-step disc sweeps unioned over free cells."""

from __future__ import annotations

import math

import numpy as np

from .world import CellGrid


class CoverageGrid:
    """Mutable union of worker sweeps over the free cells of a grid.

    Cells are credited to the worker that first covers them; a cell reached
    by several workers in the same step goes to the lowest worker index
    (sweeps are applied in ascending index order by the step function).
    """

    def __init__(self, base: CellGrid, num_workers: int):
        self.base = base
        self.num_workers = num_workers
        self.covered = np.zeros((base.width, base.height), dtype=bool)
        self.credit = np.full((base.width, base.height), -1, dtype=np.int32)
        self.per_worker_counts = np.zeros(num_workers, dtype=np.int64)
        self._free = base.free_mask
        self.free_count = int(self._free.sum())
        res = base.resolution
        self._cx = base.origin[0] + (np.arange(base.width) + 0.5) * res
        self._cy = base.origin[1] + (np.arange(base.height) + 0.5) * res

    def copy(self) -> "CoverageGrid":
        c = CoverageGrid.__new__(CoverageGrid)
        c.base = self.base
        c.num_workers = self.num_workers
        c.covered = self.covered.copy()
        c.credit = self.credit.copy()
        c.per_worker_counts = self.per_worker_counts.copy()
        c._free = self._free
        c.free_count = self.free_count
        c._cx = self._cx
        c._cy = self._cy
        return c

    @property
    def covered_count(self) -> int:
        return int(self.per_worker_counts.sum())

    def sweep(self, worker_index: int, center, cover_radius: float) -> int:
        """Mark free cells with centers within cover_radius of center; return the newly covered count."""
        base = self.base
        res = base.resolution
        cx, cy = float(center[0]), float(center[1])
        i0 = max(0, int(math.floor((cx - cover_radius - base.origin[0]) / res)))
        i1 = min(base.width - 1, int(math.floor((cx + cover_radius - base.origin[0]) / res)))
        j0 = max(0, int(math.floor((cy - cover_radius - base.origin[1]) / res)))
        j1 = min(base.height - 1, int(math.floor((cy + cover_radius - base.origin[1]) / res)))
        if i0 > i1 or j0 > j1:
            return 0
        dx = self._cx[i0 : i1 + 1, None] - cx
        dy = self._cy[None, j0 : j1 + 1] - cy
        hit = dx * dx + dy * dy <= cover_radius * cover_radius
        window = (slice(i0, i1 + 1), slice(j0, j1 + 1))
        new = hit & self._free[window] & ~self.covered[window]
        count = int(new.sum())
        if count:
            self.covered[window] |= new
            self.credit[window] = np.where(new, worker_index, self.credit[window])
            self.per_worker_counts[worker_index] += count
        return count

    def is_finished(self) -> bool:
        return self.covered_count == self.free_count

    def coverage_ratio(self) -> float:
        return self.covered_count / self.free_count

    def uncovered_mask(self) -> np.ndarray:
        return self._free & ~self.covered

    def uncovered_centers(self) -> np.ndarray:
        """World coordinates of uncovered free cell centers, shape (K, 2)."""
        return self.base.centers()[self.uncovered_mask()]

    def rle_rows(self) -> list[str]:
        """Cell status per row, run-length encoded: b=blocked, c=covered, f=free-uncovered."""
        rows = []
        for j in range(self.base.height):
            codes = np.where(self.base.blocked[:, j], "b", np.where(self.covered[:, j], "c", "f"))
            parts = []
            run_char = codes[0]
            run_len = 1
            for ch in codes[1:]:
                if ch == run_char:
                    run_len += 1
                else:
                    parts.append(f"{run_len}{run_char}")
                    run_char, run_len = ch, 1
            parts.append(f"{run_len}{run_char}")
            rows.append("".join(parts))
        return rows
