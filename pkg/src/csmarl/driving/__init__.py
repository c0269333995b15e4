"""Deterministic 2-D driving benchmark with kinematic bicycle dynamics."""

from .collision import Footprint, rectangles_overlap
from .config import default_scenario_config, load_scenario_config
from .env import DrivingEnv
from .replay_export import ReplayRecorder
from .scenarios import (
    DISCRETE_ACTIONS,
    SCENARIO_KINDS,
    ScenarioSpec,
    ScenarioState,
    StepOutcome,
    SteppedAfterDone,
    apply_discrete_action,
    build_spec,
    lane_keep_steer,
    observe,
    reset,
    scenario_step,
)
from .vehicle import VehicleState, bicycle_step

__all__ = [
    "DISCRETE_ACTIONS",
    "SCENARIO_KINDS",
    "DrivingEnv",
    "Footprint",
    "ReplayRecorder",
    "ScenarioSpec",
    "ScenarioState",
    "StepOutcome",
    "SteppedAfterDone",
    "VehicleState",
    "apply_discrete_action",
    "bicycle_step",
    "build_spec",
    "default_scenario_config",
    "lane_keep_steer",
    "load_scenario_config",
    "observe",
    "rectangles_overlap",
    "reset",
    "scenario_step",
]
