"""Baseline coverage planners and the policy interface."""

from .baselines import mobile_bcd_plan, mobile_mstc_star, static_mstc_plan
from .bcd import BcdCell, Lane, allocate_lanes, bcd_decompose, boustrophedon_path, cell_lanes
from .nav import DisconnectedAreaError, InfeasiblePlanError, line_of_sight, route
from .partition import (
    DisconnectedPartitionError,
    RegionPartition,
    choose_region_count,
    dfs_region_tour,
    kmeans_partition,
    partition_free_cells,
)
from .policies import (
    PLANNER_NAMES,
    HoldStationPolicy,
    NearestExhaustedStationPolicy,
    PlanWorkerPolicy,
    Policy,
    RandomPolicy,
    RegionTourStationPolicy,
    WorldView,
    make_planner,
    station_nearest_exhausted,
    steer_to,
    wait_and_move,
    waypoint_tracker,
)
from .stc import CoveragePlan, static_mstc_star, stc_plan

__all__ = [
    "BcdCell",
    "CoveragePlan",
    "DisconnectedAreaError",
    "DisconnectedPartitionError",
    "HoldStationPolicy",
    "InfeasiblePlanError",
    "Lane",
    "NearestExhaustedStationPolicy",
    "PLANNER_NAMES",
    "PlanWorkerPolicy",
    "Policy",
    "RandomPolicy",
    "RegionPartition",
    "RegionTourStationPolicy",
    "WorldView",
    "allocate_lanes",
    "bcd_decompose",
    "boustrophedon_path",
    "cell_lanes",
    "choose_region_count",
    "dfs_region_tour",
    "kmeans_partition",
    "line_of_sight",
    "make_planner",
    "mobile_bcd_plan",
    "mobile_mstc_star",
    "partition_free_cells",
    "route",
    "static_mstc_plan",
    "static_mstc_star",
    "station_nearest_exhausted",
    "stc_plan",
    "steer_to",
    "wait_and_move",
    "waypoint_tracker",
]
