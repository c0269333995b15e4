"""Trainer-facing environment wrapper over the scenario stepping functions.

Maps each algorithm's action format onto low-level controls: discrete
meta-action indices pass straight through; the continuous scenarios expose a
single normalized action per agent (throttle on the intersection with
automatic lane keeping, steering on the racetrack at fixed speed).
"""

from __future__ import annotations

import numpy as np

from . import scenarios
from .scenarios import DISCRETE_ACTIONS, ScenarioState, StepOutcome

__all__ = ["DrivingEnv"]


class DrivingEnv:
    def __init__(self, kind: str, config: dict | None = None):
        self.kind = kind
        self.config = config
        self.spec = scenarios.build_spec(kind, config)
        self.state: ScenarioState | None = None
        probe = scenarios.reset(kind, 0, config)
        obs1, obs2, global_state = scenarios.observe(probe)
        self.obs1_dim = obs1.shape[0]
        self.obs2_dim = obs2.shape[0]
        self.state_dim = global_state.shape[0]

    @property
    def discrete(self) -> bool:
        return self.spec.control_mode == "discrete"

    @property
    def n_actions(self) -> int:
        return len(DISCRETE_ACTIONS)

    @property
    def action_dims(self) -> tuple:
        return (1, 1)

    def reset(self, seed: int):
        self.state = scenarios.reset(self.kind, seed, self.config)
        return scenarios.observe(self.state)

    def _control(self, agent: int, action) -> tuple:
        mode = self.spec.control_mode
        a = float(np.clip(np.asarray(action).reshape(-1)[0], -1.0, 1.0))
        if mode == "throttle":
            return (a * self.spec.accel_max, scenarios.lane_keep_steer(self.state, agent))
        return (0.0, a * self.spec.steer_max)

    def step(self, actions) -> StepOutcome:
        if self.state is None:
            raise RuntimeError("reset() before step()")
        if self.discrete:
            controls = (int(actions[0]), int(actions[1]))
        else:
            controls = (self._control(0, actions[0]), self._control(1, actions[1]))
        self.state, outcome = scenarios.scenario_step(self.state, controls)
        return outcome
