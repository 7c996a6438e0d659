"""Static trajectory/coverage rendering to portable pixmaps (binary P6)."""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from ..world import scenario_from_dict, rasterize
from .episode import EpisodeTrace

GREY = (130, 130, 130)  # obstacles
BLUE_FILL = (150, 190, 240)  # covered cells
GREEN = (120, 210, 140)  # station motion range
WORKER = (20, 60, 200)
STATION = (230, 190, 30)
INTERFERER = (220, 50, 40)
FREE = (246, 246, 246)


def _draw_disc(img: np.ndarray, px: float, py: float, radius: float, color) -> None:
    h, w, _ = img.shape
    x0 = max(0, int(math.floor(px - radius)))
    x1 = min(w - 1, int(math.ceil(px + radius)))
    y0 = max(0, int(math.floor(py - radius)))
    y1 = min(h - 1, int(math.ceil(py + radius)))
    for yy in range(y0, y1 + 1):
        for xx in range(x0, x1 + 1):
            if (xx - px) ** 2 + (yy - py) ** 2 <= radius * radius:
                img[yy, xx] = color


def _draw_line(img: np.ndarray, a, b, color) -> None:
    x0, y0 = int(round(a[0])), int(round(a[1]))
    x1, y1 = int(round(b[0])), int(round(b[1]))
    dx, dy = abs(x1 - x0), -abs(y1 - y0)
    sx = 1 if x0 < x1 else -1
    sy = 1 if y0 < y1 else -1
    err = dx + dy
    h, w, _ = img.shape
    while True:
        if 0 <= x0 < w and 0 <= y0 < h:
            img[y0, x0] = color
        if x0 == x1 and y0 == y1:
            break
        e2 = 2 * err
        if e2 >= dy:
            err += dy
            x0 += sx
        if e2 <= dx:
            err += dx
            y0 += sy
    return


def render_trace(trace: EpisodeTrace, path, scale: int | None = None) -> None:
    """Raster overview of an episode: coverage, obstacles, trajectories.

    Obstacle cells grey, covered cells blue, the station's swept motion range
    green, worker/station trajectories as polylines, interferers red. Output
    is a binary PPM, bit-identical for identical traces.
    """
    scenario = scenario_from_dict(trace.header["scenario"])
    grid = rasterize(scenario)
    if scale is None:
        scale = max(2, min(10, 640 // max(grid.width, grid.height)))
    w, h = grid.width * scale, grid.height * scale
    img = np.zeros((h, w, 3), dtype=np.uint8)

    covered = np.zeros((grid.width, grid.height), dtype=bool)
    for j, row in enumerate(trace.coverage_rows):
        ix = 0
        num = ""
        for ch in row:
            if ch.isdigit():
                num += ch
            else:
                run = int(num)
                if ch == "c":
                    covered[ix : ix + run, j] = True
                ix += run
                num = ""

    for ix in range(grid.width):
        for iy in range(grid.height):
            if grid.blocked[ix, iy]:
                color = GREY
            elif covered[ix, iy]:
                color = BLUE_FILL
            else:
                color = FREE
            img[h - (iy + 1) * scale : h - iy * scale, ix * scale : (ix + 1) * scale] = color

    def to_px(x: float, y: float) -> tuple[float, float]:
        return (x / grid.resolution * scale, h - y / grid.resolution * scale)

    # station motion range first so trajectories draw on top of it
    body_px = scenario.station_limits.body_radius / grid.resolution * scale
    for rec in trace.steps:
        for s in rec["stations"]:
            px, py = to_px(s[0], s[1])
            _draw_disc(img, px, py, max(body_px, 1.5), GREEN)

    m, n = scenario.num_workers, scenario.num_stations
    prev_w = [to_px(p.x, p.y) for p in scenario.worker_poses]
    prev_s = [to_px(p.x, p.y) for p in scenario.station_poses]
    prev_i = [to_px(p.x, p.y) for p in scenario.interferer_poses]
    for rec in trace.steps:
        for i in range(m):
            cur = to_px(rec["workers"][i][0], rec["workers"][i][1])
            _draw_line(img, prev_w[i], cur, WORKER)
            prev_w[i] = cur
        for j in range(n):
            cur = to_px(rec["stations"][j][0], rec["stations"][j][1])
            _draw_line(img, prev_s[j], cur, STATION)
            prev_s[j] = cur
        for k in range(len(rec["interferers"])):
            cur = to_px(rec["interferers"][k][0], rec["interferers"][k][1])
            _draw_line(img, prev_i[k], cur, INTERFERER)
            prev_i[k] = cur
    for p in prev_w:
        _draw_disc(img, p[0], p[1], max(body_px, 2.0), WORKER)
    for p in prev_s:
        _draw_disc(img, p[0], p[1], max(body_px, 2.0), STATION)
    for p in prev_i:
        _draw_disc(img, p[0], p[1], max(body_px, 2.0), INTERFERER)

    with open(path, "wb") as fh:
        fh.write(f"P6\n{w} {h}\n255\n".encode("ascii"))
        fh.write(img.tobytes())
