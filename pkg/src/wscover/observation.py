"""Per-agent observations: zero-range vector plus ego-centric binary images.

Every agent sees a precise perception-range image and a coarser
communication-range image; both are translated and rotated into the ego
frame. Channel layouts differ by role:

  worker perception : worker, station, obstacle, uncovered
  worker comm       : worker, station, uncovered
  station perception: obstacle, worker_normal, worker_exhausted
  station comm      : station, worker_normal, worker_exhausted

Interferers appear in the obstacle channels (they are locally perceivable
obstacles); the ego agent never appears in its own robot channels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .coverage import CoverageGrid
from .dynamics import WorldState
from .world import Pose, Scenario, world_to_ego

WORKER_PERCEPTION_CHANNELS = ("worker", "station", "obstacle", "uncovered")
WORKER_COMM_CHANNELS = ("worker", "station", "uncovered")
STATION_PERCEPTION_CHANNELS = ("obstacle", "worker_normal", "worker_exhausted")
STATION_COMM_CHANNELS = ("station", "worker_normal", "worker_exhausted")


@dataclass(frozen=True)
class ObservationBundle:
    zero: np.ndarray  # [x, y, v, omega] (+ energy fraction for workers)
    perception: np.ndarray  # uint8 (S, S, n_p)
    comm: np.ndarray  # uint8 (C, C, n_c)
    perception_channels: tuple[str, ...]
    comm_channels: tuple[str, ...]


def encode_zero_range(pose: Pose, velocity, energy_fraction: float | None = None) -> np.ndarray:
    """Global position and body-frame velocity, plus p for workers."""
    vec = [pose.x, pose.y, float(velocity[0]), float(velocity[1])]
    if energy_fraction is not None:
        vec.append(float(energy_fraction))
    return np.array(vec, dtype=float)


def encode_object_image(ego: Pose, channels, size: int, resolution: float, range_limit: float) -> np.ndarray:
    """Binary ego-frame image; one channel per object point list.

    Points beyond range_limit are dropped, the rest are rotated/translated
    into the ego frame and quantized with floor((coord + extent/2) / res);
    the ego position maps to the center pixel. Image is indexed [ix, iy, ch]
    with ix along the ego's forward axis.
    """
    img = np.zeros((size, size, len(channels)), dtype=np.uint8)
    half_extent = size * resolution / 2.0
    ego_xy = np.array([ego.x, ego.y])
    for ch, pts in enumerate(channels):
        pts = np.asarray(pts, dtype=float).reshape(-1, 2)
        if len(pts) == 0:
            continue
        d = np.hypot(pts[:, 0] - ego_xy[0], pts[:, 1] - ego_xy[1])
        pts = pts[d <= range_limit]
        if len(pts) == 0:
            continue
        q = world_to_ego(ego, pts)
        ix = np.floor((q[:, 0] + half_extent) / resolution).astype(int)
        iy = np.floor((q[:, 1] + half_extent) / resolution).astype(int)
        ok = (ix >= 0) & (ix < size) & (iy >= 0) & (iy < size)
        img[ix[ok], iy[ok], ch] = 1
    return img


class ObservationEncoder:
    """Builds ObservationBundles for all agents of one episode's world."""

    def __init__(self, scenario: Scenario, grid):
        self.scenario = scenario
        self.grid = grid
        self._blocked_centers = grid.centers()[grid.blocked]

    def _resolutions(self, limits) -> tuple[float, float]:
        obs = self.scenario.observation
        m_perc = obs.m_perc if obs.m_perc is not None else 2.0 * limits.perception_range / obs.perception_size
        m_comm = obs.m_comm if obs.m_comm is not None else 2.0 * limits.communication_range / obs.comm_size
        return m_perc, m_comm

    def observe(self, state: WorldState, coverage: CoverageGrid, kind: str, index: int) -> ObservationBundle:
        sc = self.scenario
        obs = sc.observation
        p_e = sc.energy.exhausted_threshold
        cap = sc.energy.capacity
        worker_xy = state.worker_pose[:, :2]
        station_xy = state.station_pose[:, :2]
        intf_xy = state.intf_pose[:, :2] if len(state.intf_pose) else np.zeros((0, 2))
        obstacle_pts = (
            np.concatenate([self._blocked_centers, intf_xy]) if len(intf_xy) else self._blocked_centers
        )
        uncovered = coverage.uncovered_centers()
        fractions = state.worker_energy / cap
        normal_xy = worker_xy[fractions >= p_e]
        exhausted_xy = worker_xy[fractions < p_e]

        if kind == "worker":
            ego = Pose(*state.worker_pose[index])
            limits = sc.worker_limits
            others = np.delete(worker_xy, index, axis=0)
            m_perc, m_comm = self._resolutions(limits)
            perception = encode_object_image(
                ego,
                [others, station_xy, obstacle_pts, uncovered],
                obs.perception_size,
                m_perc,
                limits.perception_range,
            )
            comm = encode_object_image(
                ego,
                [others, station_xy, uncovered],
                obs.comm_size,
                m_comm,
                limits.communication_range,
            )
            zero = encode_zero_range(ego, state.worker_vel[index], float(fractions[index]))
            return ObservationBundle(zero, perception, comm, WORKER_PERCEPTION_CHANNELS, WORKER_COMM_CHANNELS)

        if kind == "station":
            ego = Pose(*state.station_pose[index])
            limits = sc.station_limits
            other_stations = np.delete(station_xy, index, axis=0)
            m_perc, m_comm = self._resolutions(limits)
            perception = encode_object_image(
                ego,
                [obstacle_pts, normal_xy, exhausted_xy],
                obs.perception_size,
                m_perc,
                limits.perception_range,
            )
            comm = encode_object_image(
                ego,
                [other_stations, normal_xy, exhausted_xy],
                obs.comm_size,
                m_comm,
                limits.communication_range,
            )
            zero = encode_zero_range(ego, state.station_vel[index])
            return ObservationBundle(zero, perception, comm, STATION_PERCEPTION_CHANNELS, STATION_COMM_CHANNELS)

        raise ValueError(f"unknown agent kind {kind!r}")


def observe(state: WorldState, coverage: CoverageGrid, scenario: Scenario, kind: str, index: int) -> ObservationBundle:
    """One-shot convenience wrapper around :class:`ObservationEncoder`."""
    return ObservationEncoder(scenario, coverage.base).observe(state, coverage, kind, index)


# ---------------------------------------------------------------------------
# observation dump for external training pipelines
# ---------------------------------------------------------------------------


def dump_observations(bundles, path) -> None:
    """Write bundles as a text header plus channel-major bit-packed arrays.

    `bundles` is a sequence of (label, ObservationBundle). The header lists
    sizes, channel names and zero-range vectors; image bits follow in header
    order, one packed channel at a time.
    """
    header: list[str] = ["wscover-obs-v1", f"agents {len(bundles)}"]
    blobs: list[bytes] = []
    for label, b in bundles:
        s = b.perception.shape[0]
        c = b.comm.shape[0]
        header.append(
            f"agent {label} zero={','.join(repr(float(v)) for v in b.zero)} "
            f"perception={s}x{s}x{len(b.perception_channels)}:{','.join(b.perception_channels)} "
            f"comm={c}x{c}x{len(b.comm_channels)}:{','.join(b.comm_channels)}"
        )
        for img, names in ((b.perception, b.perception_channels), (b.comm, b.comm_channels)):
            for ch in range(len(names)):
                blobs.append(np.packbits(img[:, :, ch].ravel()).tobytes())
    header.append("end-header")
    with open(path, "wb") as fh:
        fh.write(("\n".join(header) + "\n").encode("ascii"))
        for blob in blobs:
            fh.write(blob)


def load_observation_dump(path) -> list[tuple[str, ObservationBundle]]:
    raw = Path(path).read_bytes()
    end = raw.index(b"end-header\n")
    lines = raw[:end].decode("ascii").splitlines()
    body = raw[end + len(b"end-header\n") :]
    assert lines[0] == "wscover-obs-v1"
    out: list[tuple[str, ObservationBundle]] = []
    offset = 0

    def unpack(size: int, nch: int) -> tuple[np.ndarray, int]:
        nonlocal offset
        per = math.ceil(size * size / 8)
        img = np.zeros((size, size, nch), dtype=np.uint8)
        for ch in range(nch):
            bits = np.unpackbits(np.frombuffer(body, dtype=np.uint8, count=per, offset=offset))
            img[:, :, ch] = bits[: size * size].reshape(size, size)
            offset += per
        return img, offset

    for line in lines[2:]:
        parts = line.split(" ")
        label = parts[1]
        fields = dict(p.split("=", 1) for p in parts[2:])
        zero = np.array([float(v) for v in fields["zero"].split(",")])
        p_dims, p_names = fields["perception"].split(":")
        c_dims, c_names = fields["comm"].split(":")
        ps = int(p_dims.split("x")[0])
        cs = int(c_dims.split("x")[0])
        p_channels = tuple(p_names.split(","))
        c_channels = tuple(c_names.split(","))
        perception, _ = unpack(ps, len(p_channels))
        comm, _ = unpack(cs, len(c_channels))
        out.append((label, ObservationBundle(zero, perception, comm, p_channels, c_channels)))
    return out
