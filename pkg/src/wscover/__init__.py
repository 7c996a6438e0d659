"""Worker-station multi-robot coverage: simulator, baseline planners, harness."""

from .coverage import CoverageGrid
from .dynamics import (
    Action,
    ActionCountError,
    EpisodeOverError,
    StepEvents,
    WorldState,
    detect_collisions,
    initial_state,
    integrate_unicycle,
    interferer_step,
    resolve_docking,
    scale_action,
    step,
    update_energy,
)
from .observation import (
    ObservationBundle,
    ObservationEncoder,
    dump_observations,
    encode_object_image,
    encode_zero_range,
    load_observation_dump,
    observe,
)
from .rewards import RewardBreakdown, covering_reward, discounted_return, energy_penalty, shared_reward
from .world import (
    CellGrid,
    EnergyParams,
    InterfererParams,
    InvalidScenarioError,
    KinematicLimits,
    ObservationParams,
    Pose,
    RewardParams,
    Scenario,
    ego_to_world,
    load_scenario,
    point_in_free_space,
    point_in_polygon,
    rasterize,
    save_scenario,
    scenario_from_dict,
    scenario_to_dict,
    world_to_ego,
    wrap_angle,
)

__version__ = "0.1.0"
