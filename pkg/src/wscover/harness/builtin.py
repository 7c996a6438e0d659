"""Bundled test scenarios.

Quantitative parameters (area size, cover radius, roster sizes) follow the
benchmark test-case table; the obstacle silhouettes are qualitative
approximations, and the energy/kinematic values are declared engineering
choices sized so that recharge rendezvous matters on the large campus maps
and stays rare on the small ones.
"""

from __future__ import annotations

from ..world import (
    EnergyParams,
    InterfererParams,
    KinematicLimits,
    ObservationParams,
    Pose,
    RewardParams,
    Scenario,
)


def _rect(x0: float, y0: float, x1: float, y1: float):
    return ((x0, y0), (x1, y0), (x1, y1), (x0, y1))


def _limits(cover: float, perception: float, v: float = 2.0) -> KinematicLimits:
    return KinematicLimits(
        v_max=v,
        omega_max=2.0,
        body_radius=0.3,
        perception_range=perception,
        communication_range=2.0 * perception,
        cover_radius=cover,
    )


def _station_limits(perception: float, v: float = 2.0) -> KinematicLimits:
    return KinematicLimits(
        v_max=v,
        omega_max=2.0,
        body_radius=0.3,
        perception_range=perception,
        communication_range=2.0 * perception,
        cover_radius=0.0,
    )


def _star() -> Scenario:
    corner = 9.0
    obstacles = (
        ((0.0, 0.0), (corner, 0.0), (0.0, corner)),
        ((30.0, 0.0), (30.0, corner), (30.0 - corner, 0.0)),
        ((30.0, 30.0), (30.0 - corner, 30.0), (30.0, 30.0 - corner)),
        ((0.0, 30.0), (0.0, 30.0 - corner), (corner, 30.0)),
        ((11.0, 0.0), (19.0, 0.0), (15.0, 5.0)),
        ((19.0, 30.0), (11.0, 30.0), (15.0, 25.0)),
        ((0.0, 11.0), (5.0, 15.0), (0.0, 19.0)),
        ((30.0, 19.0), (25.0, 15.0), (30.0, 11.0)),
    )
    return Scenario(
        name="star",
        bounds=(30.0, 30.0),
        obstacles=obstacles,
        worker_poses=(Pose(13.5, 13.5), Pose(16.5, 13.5)),
        station_poses=(Pose(15.0, 11.0, 1.5707963267948966),),
        interferer_poses=(Pose(15.0, 20.0),),
        raster_resolution=1.0,
        worker_limits=_limits(cover=4.0, perception=8.0),
        station_limits=_station_limits(perception=8.0),
        energy=EnergyParams(capacity=260.0, e_discharge=1.0, e_charge=10.0, rendezvous_radius=2.0),
        reward=RewardParams(),
        observation=ObservationParams(),
        interferer=InterfererParams(speed=1.0, period=20, body_radius=0.3),
        dt=0.5,
        max_steps=2500,
        seed=0,
    )


def _corridor() -> Scenario:
    obstacles = (
        _rect(0.0, 16.0, 90.0, 18.0),
        _rect(30.0, 32.0, 120.0, 34.0),
    )
    return Scenario(
        name="corridor",
        bounds=(120.0, 50.0),
        obstacles=obstacles,
        worker_poses=(Pose(4.0, 4.0), Pose(8.0, 4.0), Pose(12.0, 4.0)),
        station_poses=(Pose(8.0, 9.0),),
        interferer_poses=(
            Pose(60.0, 8.0),
            Pose(100.0, 8.0),
            Pose(60.0, 25.0),
            Pose(20.0, 25.0),
            Pose(60.0, 42.0),
            Pose(100.0, 42.0),
        ),
        raster_resolution=1.0,
        worker_limits=_limits(cover=4.0, perception=8.0),
        station_limits=_station_limits(perception=8.0),
        energy=EnergyParams(capacity=1400.0, e_discharge=1.0, e_charge=30.0, rendezvous_radius=2.0),
        reward=RewardParams(),
        observation=ObservationParams(),
        interferer=InterfererParams(speed=1.0, period=20, body_radius=0.3),
        dt=0.5,
        max_steps=6000,
        seed=0,
    )


_CAMPUS_BUILDINGS = (
    _rect(20.0, 10.0, 35.0, 25.0),
    _rect(50.0, 30.0, 70.0, 45.0),
    _rect(85.0, 8.0, 105.0, 22.0),
    _rect(120.0, 35.0, 140.0, 50.0),
    _rect(150.0, 10.0, 165.0, 28.0),
    _rect(40.0, 5.0, 55.0, 14.0),
    _rect(95.0, 40.0, 115.0, 52.0),
    _rect(15.0, 40.0, 30.0, 52.0),
    _rect(135.0, 8.0, 148.0, 20.0),
    _rect(65.0, 15.0, 78.0, 25.0),
)

_CAMPUS_INTERFERERS = (
    Pose(60.0, 50.0),
    Pose(30.0, 30.0),
    Pose(90.0, 30.0),
    Pose(110.0, 10.0),
    Pose(130.0, 25.0),
    Pose(170.0, 40.0),
)


def _cuhksz_1() -> Scenario:
    return Scenario(
        name="cuhksz-1",
        bounds=(180.0, 60.0),
        obstacles=_CAMPUS_BUILDINGS,
        worker_poses=(Pose(4.0, 4.0), Pose(8.0, 4.0), Pose(12.0, 4.0)),
        station_poses=(Pose(8.0, 8.0),),
        interferer_poses=_CAMPUS_INTERFERERS,
        raster_resolution=1.0,
        worker_limits=_limits(cover=2.0, perception=6.0),
        station_limits=_station_limits(perception=6.0),
        energy=EnergyParams(capacity=850.0, e_discharge=1.0, e_charge=20.0, rendezvous_radius=2.0),
        reward=RewardParams(),
        observation=ObservationParams(),
        interferer=InterfererParams(speed=1.0, period=20, body_radius=0.3),
        dt=0.5,
        max_steps=16000,
        seed=0,
    )


def _cuhksz_2() -> Scenario:
    return Scenario(
        name="cuhksz-2",
        bounds=(180.0, 60.0),
        obstacles=_CAMPUS_BUILDINGS,
        worker_poses=(
            Pose(4.0, 4.0),
            Pose(8.0, 4.0),
            Pose(12.0, 4.0),
            Pose(4.0, 12.0),
            Pose(8.0, 12.0),
            Pose(12.0, 12.0),
        ),
        station_poses=(Pose(8.0, 8.0), Pose(14.0, 8.0)),
        interferer_poses=_CAMPUS_INTERFERERS,
        raster_resolution=1.0,
        worker_limits=_limits(cover=2.0, perception=6.0),
        station_limits=_station_limits(perception=6.0),
        energy=EnergyParams(capacity=850.0, e_discharge=1.0, e_charge=20.0, rendezvous_radius=2.0),
        reward=RewardParams(),
        observation=ObservationParams(),
        interferer=InterfererParams(speed=1.0, period=20, body_radius=0.3),
        dt=0.5,
        max_steps=10000,
        seed=0,
    )


def load_builtin_scenarios() -> dict[str, Scenario]:
    """The four bundled test-case scenarios, keyed by name."""
    out = {}
    for build in (_star, _corridor, _cuhksz_1, _cuhksz_2):
        s = build()
        s.validate()
        out[s.name] = s
    return out


def builtin_scenario(name: str) -> Scenario:
    scenarios = load_builtin_scenarios()
    if name not in scenarios:
        raise KeyError(f"unknown builtin scenario {name!r}; have {sorted(scenarios)}")
    return scenarios[name]
