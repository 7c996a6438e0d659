"""World model: scenario definition, planar geometry and rasterization.

A scenario describes an axis-aligned rectangular target area with polygonal
obstacles, the robot rosters (workers / stations / interferers) and all
physical, energy, reward and observation parameters. The target area is
rasterized into a cell grid by classifying each cell center, which turns the
coverage task into set arithmetic over free cells.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

TAU = 2.0 * math.pi

# absolute slack used for on-boundary point/polygon tests
GEOM_EPS = 1e-9


class InvalidScenarioError(ValueError):
    """Raised when a scenario violates its structural invariants."""


def wrap_angle(a: float) -> float:
    """Normalize an angle to (-pi, pi]."""
    a = math.remainder(a, TAU)
    if a <= -math.pi:
        return math.pi
    return a


@dataclass(frozen=True)
class Pose:
    x: float
    y: float
    heading: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "heading", wrap_angle(float(self.heading)))

    @property
    def xy(self) -> np.ndarray:
        return np.array([self.x, self.y], dtype=float)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.heading)


def world_to_ego(ego: Pose, p) -> np.ndarray:
    """Map world point(s) into the ego frame: translate by -ego, rotate by -heading."""
    p = np.asarray(p, dtype=float)
    c, s = math.cos(ego.heading), math.sin(ego.heading)
    dx = p[..., 0] - ego.x
    dy = p[..., 1] - ego.y
    return np.stack([c * dx + s * dy, -s * dx + c * dy], axis=-1)


def ego_to_world(ego: Pose, q) -> np.ndarray:
    """Inverse of :func:`world_to_ego`."""
    q = np.asarray(q, dtype=float)
    c, s = math.cos(ego.heading), math.sin(ego.heading)
    qx, qy = q[..., 0], q[..., 1]
    return np.stack([c * qx - s * qy + ego.x, s * qx + c * qy + ego.y], axis=-1)


# ---------------------------------------------------------------------------
# polygons
# ---------------------------------------------------------------------------

Polygon = tuple[tuple[float, float], ...]


def _poly_array(poly) -> np.ndarray:
    arr = np.asarray(poly, dtype=float)
    if arr.ndim != 2 or arr.shape[0] < 3 or arr.shape[1] != 2:
        raise InvalidScenarioError(f"polygon needs >=3 planar vertices, got shape {arr.shape}")
    return arr


def point_on_polygon_boundary(p, poly, eps: float = GEOM_EPS) -> bool:
    px, py = float(p[0]), float(p[1])
    arr = _poly_array(poly)
    a = arr
    b = np.roll(arr, -1, axis=0)
    ex, ey = b[:, 0] - a[:, 0], b[:, 1] - a[:, 1]
    wx, wy = px - a[:, 0], py - a[:, 1]
    cross = ex * wy - ey * wx
    dot = ex * wx + ey * wy
    ll = ex * ex + ey * ey
    scale = np.maximum(1.0, np.sqrt(ll))
    on = (np.abs(cross) <= eps * scale) & (dot >= -eps * scale) & (dot <= ll + eps * scale)
    return bool(on.any())


def point_in_polygon(p, poly) -> bool:
    """Membership test with the boundary counted as inside (blocked)."""
    if point_on_polygon_boundary(p, poly):
        return True
    px, py = float(p[0]), float(p[1])
    arr = _poly_array(poly)
    inside = False
    n = arr.shape[0]
    for i in range(n):
        x1, y1 = arr[i]
        x2, y2 = arr[(i + 1) % n]
        if (y1 > py) != (y2 > py):
            xin = (x2 - x1) * (py - y1) / (y2 - y1) + x1
            if px < xin:
                inside = not inside
    return inside


def polygon_contains(points: np.ndarray, poly) -> np.ndarray:
    """Vectorized inclusive point-in-polygon over an (M, 2) point array."""
    arr = _poly_array(poly)
    pts = np.asarray(points, dtype=float)
    x, y = pts[:, 0], pts[:, 1]
    inside = np.zeros(len(pts), dtype=bool)
    on_edge = np.zeros(len(pts), dtype=bool)
    n = arr.shape[0]
    for i in range(n):
        x1, y1 = arr[i]
        x2, y2 = arr[(i + 1) % n]
        cond = (y1 > y) != (y2 > y)
        if y2 != y1:
            xin = (x2 - x1) * (y - y1) / (y2 - y1) + x1
            inside ^= cond & (x < xin)
        ex, ey = x2 - x1, y2 - y1
        ll = ex * ex + ey * ey
        scale = max(1.0, math.sqrt(ll))
        cross = ex * (y - y1) - ey * (x - x1)
        dot = ex * (x - x1) + ey * (y - y1)
        on_edge |= (np.abs(cross) <= GEOM_EPS * scale) & (dot >= -GEOM_EPS * scale) & (dot <= ll + GEOM_EPS * scale)
    return inside | on_edge


def segment_point_distance(p, a, b) -> float:
    px, py = float(p[0]), float(p[1])
    ax, ay = float(a[0]), float(a[1])
    bx, by = float(b[0]), float(b[1])
    ex, ey = bx - ax, by - ay
    ll = ex * ex + ey * ey
    if ll == 0.0:
        return math.hypot(px - ax, py - ay)
    t = max(0.0, min(1.0, ((px - ax) * ex + (py - ay) * ey) / ll))
    return math.hypot(px - (ax + t * ex), py - (ay + t * ey))


def distance_to_polygon(p, poly) -> float:
    """Distance from a point to a polygon; 0 if inside or on the boundary."""
    if point_in_polygon(p, poly):
        return 0.0
    arr = _poly_array(poly)
    n = arr.shape[0]
    return min(segment_point_distance(p, arr[i], arr[(i + 1) % n]) for i in range(n))


def disc_intersects_polygon(center, radius: float, poly) -> bool:
    """Strict overlap test between a closed disc and a polygon."""
    return distance_to_polygon(center, poly) < radius


def point_in_free_space(bounds: tuple[float, float], obstacles: Sequence, p) -> bool:
    """True iff strictly inside the bounds rectangle and outside every obstacle."""
    x, y = float(p[0]), float(p[1])
    w, h = bounds
    if not (0.0 < x < w and 0.0 < y < h):
        return False
    return not any(point_in_polygon(p, poly) for poly in obstacles)


# ---------------------------------------------------------------------------
# parameter blocks
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KinematicLimits:
    v_max: float
    omega_max: float
    body_radius: float
    perception_range: float
    communication_range: float
    cover_radius: float = 0.0  # workers only

    def validate(self, role: str) -> None:
        for name in ("v_max", "omega_max", "body_radius", "perception_range", "communication_range"):
            if getattr(self, name) <= 0:
                raise InvalidScenarioError(f"{role} {name} must be > 0")
        if self.communication_range < self.perception_range:
            raise InvalidScenarioError(f"{role} communication_range must be >= perception_range")
        if role == "worker" and self.cover_radius <= 0:
            raise InvalidScenarioError("worker cover_radius must be > 0")


@dataclass(frozen=True)
class EnergyParams:
    capacity: float = 100.0
    e_discharge: float | None = None  # default: capacity / 600
    e_charge: float | None = None  # default: 10 * e_discharge
    exhausted_threshold: float = 0.2
    rendezvous_radius: float = 1.0
    soft: bool = False  # training semantics: no floor at 0, no immobility clamp

    def __post_init__(self):
        if self.e_discharge is None:
            object.__setattr__(self, "e_discharge", self.capacity / 600.0)
        if self.e_charge is None:
            object.__setattr__(self, "e_charge", 10.0 * self.e_discharge)

    def validate(self) -> None:
        if self.capacity <= 0:
            raise InvalidScenarioError("energy capacity must be > 0")
        if not (0.0 < self.exhausted_threshold < 1.0):
            raise InvalidScenarioError("exhausted_threshold must be in (0, 1)")
        if self.e_discharge <= 0 or self.e_charge <= 0:
            raise InvalidScenarioError("e_discharge and e_charge must be > 0")
        if self.rendezvous_radius <= 0:
            raise InvalidScenarioError("rendezvous_radius must be > 0")


@dataclass(frozen=True)
class RewardParams:
    r_cover: float = 0.1
    r_finish: float = 10.0
    r_collision: float = -1.0
    r_time: float = -0.01
    gamma: float = 0.99

    def validate(self) -> None:
        if self.r_cover <= 0:
            raise InvalidScenarioError("r_cover must be > 0")
        if self.r_finish < 0:
            raise InvalidScenarioError("r_finish must be >= 0")
        if self.r_collision > 0 or self.r_time > 0:
            raise InvalidScenarioError("r_collision and r_time must be <= 0")
        if not (0.0 < self.gamma <= 1.0):
            raise InvalidScenarioError("gamma must be in (0, 1]")


@dataclass(frozen=True)
class ObservationParams:
    perception_size: int = 20
    comm_size: int = 30
    m_perc: float | None = None  # default: 2 * perception_range / perception_size
    m_comm: float | None = None  # default: 2 * communication_range / comm_size

    def validate(self) -> None:
        if self.perception_size <= 0 or self.comm_size <= 0:
            raise InvalidScenarioError("observation image sizes must be > 0")
        if self.m_perc is not None and self.m_comm is not None and self.m_comm < self.m_perc:
            raise InvalidScenarioError("m_comm must be >= m_perc (comm image is coarser)")


@dataclass(frozen=True)
class InterfererParams:
    speed: float = 1.0
    period: int = 20  # steps of straight motion between random turns
    body_radius: float = 0.3

    def validate(self) -> None:
        if self.speed < 0 or self.period < 1 or self.body_radius <= 0:
            raise InvalidScenarioError("bad interferer parameters")


# ---------------------------------------------------------------------------
# scenario
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Scenario:
    name: str
    bounds: tuple[float, float]
    obstacles: tuple[Polygon, ...]
    worker_poses: tuple[Pose, ...]
    station_poses: tuple[Pose, ...]
    interferer_poses: tuple[Pose, ...]
    raster_resolution: float
    worker_limits: KinematicLimits
    station_limits: KinematicLimits
    energy: EnergyParams = EnergyParams()
    reward: RewardParams = RewardParams()
    observation: ObservationParams = ObservationParams()
    interferer: InterfererParams = InterfererParams()
    dt: float = 0.5
    max_steps: int = 2000
    seed: int = 0

    @property
    def num_workers(self) -> int:
        return len(self.worker_poses)

    @property
    def num_stations(self) -> int:
        return len(self.station_poses)

    @property
    def num_interferers(self) -> int:
        return len(self.interferer_poses)

    def obstacle_arrays(self) -> list[np.ndarray]:
        return [_poly_array(p) for p in self.obstacles]

    def validate(self) -> None:
        if self.num_workers < 1:
            raise InvalidScenarioError("need at least one worker")
        if self.num_stations < 1:
            raise InvalidScenarioError("need at least one station")
        if self.raster_resolution <= 0:
            raise InvalidScenarioError("raster_resolution must be > 0")
        if self.dt <= 0:
            raise InvalidScenarioError("dt must be > 0")
        if self.max_steps < 1:
            raise InvalidScenarioError("max_steps must be >= 1")
        if self.bounds[0] <= 0 or self.bounds[1] <= 0:
            raise InvalidScenarioError("bounds must be positive")
        self.worker_limits.validate("worker")
        self.station_limits.validate("station")
        self.energy.validate()
        self.reward.validate()
        self.observation.validate()
        self.interferer.validate()
        for poly in self.obstacles:
            _poly_array(poly)
        for role, poses in (
            ("worker", self.worker_poses),
            ("station", self.station_poses),
            ("interferer", self.interferer_poses),
        ):
            for i, pose in enumerate(poses):
                if not point_in_free_space(self.bounds, self.obstacles, (pose.x, pose.y)):
                    raise InvalidScenarioError(f"{role} {i} initial pose {pose.as_tuple()} not in free space")

    def with_interferers(self, count: int) -> "Scenario":
        """Copy with the interferer roster truncated/kept; 0 drops them all."""
        return replace(self, interferer_poses=self.interferer_poses[:count])


# ---------------------------------------------------------------------------
# rasterization
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CellGrid:
    width: int
    height: int
    origin: tuple[float, float]
    resolution: float
    blocked: np.ndarray  # bool, shape (width, height)

    @property
    def free_mask(self) -> np.ndarray:
        return ~self.blocked

    @property
    def free_count(self) -> int:
        return int(self.free_mask.sum())

    def cell_center(self, ix: int, iy: int) -> tuple[float, float]:
        return (
            self.origin[0] + (ix + 0.5) * self.resolution,
            self.origin[1] + (iy + 0.5) * self.resolution,
        )

    def centers(self) -> np.ndarray:
        """All cell centers as an array of shape (width, height, 2)."""
        xs = self.origin[0] + (np.arange(self.width) + 0.5) * self.resolution
        ys = self.origin[1] + (np.arange(self.height) + 0.5) * self.resolution
        gx, gy = np.meshgrid(xs, ys, indexing="ij")
        return np.stack([gx, gy], axis=-1)

    def free_centers(self) -> np.ndarray:
        return self.centers()[self.free_mask]

    def index_of(self, p) -> tuple[int, int]:
        ix = int(math.floor((float(p[0]) - self.origin[0]) / self.resolution))
        iy = int(math.floor((float(p[1]) - self.origin[1]) / self.resolution))
        return ix, iy

    def in_grid(self, ix: int, iy: int) -> bool:
        return 0 <= ix < self.width and 0 <= iy < self.height

    def is_free(self, ix: int, iy: int) -> bool:
        return self.in_grid(ix, iy) and not self.blocked[ix, iy]


def rasterize(scenario: Scenario) -> CellGrid:
    """Rasterize the target area; a cell is blocked iff its center point is not free."""
    scenario.validate()
    res = scenario.raster_resolution
    w, h = scenario.bounds
    nx = max(1, math.ceil(w / res - 1e-9))
    ny = max(1, math.ceil(h / res - 1e-9))
    xs = (np.arange(nx) + 0.5) * res
    ys = (np.arange(ny) + 0.5) * res
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    pts = np.stack([gx.ravel(), gy.ravel()], axis=-1)
    blocked = (pts[:, 0] >= w) | (pts[:, 1] >= h)
    for poly in scenario.obstacles:
        blocked |= polygon_contains(pts, poly)
    blocked = blocked.reshape(nx, ny)
    grid = CellGrid(width=nx, height=ny, origin=(0.0, 0.0), resolution=res, blocked=blocked)
    if grid.free_count == 0:
        raise InvalidScenarioError("rasterization produced zero free cells")
    grid.blocked.setflags(write=False)
    return grid


# ---------------------------------------------------------------------------
# scenario file i/o (JSON)
# ---------------------------------------------------------------------------


def scenario_to_dict(s: Scenario) -> dict:
    def kin(k: KinematicLimits, worker: bool) -> dict:
        d = {
            "v_max": k.v_max,
            "omega_max": k.omega_max,
            "body_radius": k.body_radius,
            "perception_range": k.perception_range,
            "communication_range": k.communication_range,
        }
        if worker:
            d["cover_radius"] = k.cover_radius
        return d

    return {
        "name": s.name,
        "bounds": {"size": [s.bounds[0], s.bounds[1]], "raster_resolution": s.raster_resolution},
        "obstacles": [[list(v) for v in poly] for poly in s.obstacles],
        "robots": {
            "workers": {
                "count": s.num_workers,
                "poses": [list(p.as_tuple()) for p in s.worker_poses],
                "kinematics": kin(s.worker_limits, True),
            },
            "stations": {
                "count": s.num_stations,
                "poses": [list(p.as_tuple()) for p in s.station_poses],
                "kinematics": kin(s.station_limits, False),
            },
            "interferers": {
                "count": s.num_interferers,
                "poses": [list(p.as_tuple()) for p in s.interferer_poses],
            },
        },
        "energy": {
            "capacity": s.energy.capacity,
            "e_discharge": s.energy.e_discharge,
            "e_charge": s.energy.e_charge,
            "exhausted_threshold": s.energy.exhausted_threshold,
            "rendezvous_radius": s.energy.rendezvous_radius,
            "soft": s.energy.soft,
        },
        "reward": {
            "r_cover": s.reward.r_cover,
            "r_finish": s.reward.r_finish,
            "r_collision": s.reward.r_collision,
            "r_time": s.reward.r_time,
            "gamma": s.reward.gamma,
        },
        "observation": {
            "perception_size": s.observation.perception_size,
            "comm_size": s.observation.comm_size,
            "m_perc": s.observation.m_perc,
            "m_comm": s.observation.m_comm,
        },
        "interferer": {
            "speed": s.interferer.speed,
            "period": s.interferer.period,
            "body_radius": s.interferer.body_radius,
        },
        "dt": s.dt,
        "max_steps": s.max_steps,
        "seed": s.seed,
    }


def scenario_from_dict(d: dict) -> Scenario:
    try:
        bounds = d["bounds"]
        robots = d["robots"]

        def poses(block) -> tuple[Pose, ...]:
            ps = tuple(Pose(*map(float, p)) for p in block.get("poses", []))
            count = int(block.get("count", len(ps)))
            if count != len(ps):
                raise InvalidScenarioError(f"count {count} does not match {len(ps)} poses")
            return ps

        def kin(block) -> KinematicLimits:
            return KinematicLimits(
                v_max=float(block["v_max"]),
                omega_max=float(block["omega_max"]),
                body_radius=float(block["body_radius"]),
                perception_range=float(block["perception_range"]),
                communication_range=float(block["communication_range"]),
                cover_radius=float(block.get("cover_radius", 0.0)),
            )

        obs = d.get("observation", {}) or {}
        scenario = Scenario(
            name=str(d["name"]),
            bounds=(float(bounds["size"][0]), float(bounds["size"][1])),
            obstacles=tuple(tuple(tuple(map(float, v)) for v in poly) for poly in d.get("obstacles", [])),
            worker_poses=poses(robots["workers"]),
            station_poses=poses(robots["stations"]),
            interferer_poses=poses(robots.get("interferers", {"poses": []})),
            raster_resolution=float(bounds["raster_resolution"]),
            worker_limits=kin(robots["workers"]["kinematics"]),
            station_limits=kin(robots["stations"]["kinematics"]),
            energy=EnergyParams(
                capacity=float(d["energy"]["capacity"]),
                e_discharge=float(d["energy"]["e_discharge"]) if d["energy"].get("e_discharge") is not None else None,
                e_charge=float(d["energy"]["e_charge"]) if d["energy"].get("e_charge") is not None else None,
                exhausted_threshold=float(d["energy"].get("exhausted_threshold", 0.2)),
                rendezvous_radius=float(d["energy"].get("rendezvous_radius", 1.0)),
                soft=bool(d["energy"].get("soft", False)),
            ),
            reward=RewardParams(**{k: float(v) for k, v in d.get("reward", {}).items()}),
            observation=ObservationParams(
                perception_size=int(obs.get("perception_size", 20)),
                comm_size=int(obs.get("comm_size", 30)),
                m_perc=None if obs.get("m_perc") is None else float(obs["m_perc"]),
                m_comm=None if obs.get("m_comm") is None else float(obs["m_comm"]),
            ),
            interferer=InterfererParams(
                speed=float(d.get("interferer", {}).get("speed", 1.0)),
                period=int(d.get("interferer", {}).get("period", 20)),
                body_radius=float(d.get("interferer", {}).get("body_radius", 0.3)),
            ),
            dt=float(d["dt"]),
            max_steps=int(d["max_steps"]),
            seed=int(d["seed"]),
        )
    except InvalidScenarioError:
        raise
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise InvalidScenarioError(f"malformed scenario document: {exc}") from exc
    scenario.validate()
    return scenario


def scenario_dumps(s: Scenario) -> str:
    return json.dumps(scenario_to_dict(s), indent=2, sort_keys=True) + "\n"


def save_scenario(s: Scenario, path) -> None:
    Path(path).write_text(scenario_dumps(s), encoding="utf-8")


def load_scenario(path) -> Scenario:
    try:
        d = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidScenarioError(f"cannot read scenario {path}: {exc}") from exc
    return scenario_from_dict(d)
