"""Run configuration: every knob of a training run, YAML round-trippable."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import yaml

ALGORITHMS = ("csq", "cs-maddpg", "tabular-verify")
DISCRETE_SCENARIOS = ("merge", "roundabout")
CONTINUOUS_SCENARIOS = ("intersection", "racetrack")

__all__ = ["RunConfig", "load_run_config", "save_run_config",
           "ALGORITHMS", "DISCRETE_SCENARIOS", "CONTINUOUS_SCENARIOS"]


@dataclass
class RunConfig:
    """All parameters of one training/evaluation run.

    Discrete-action training (csq) pairs with merge/roundabout; continuous
    (cs-maddpg) with intersection/racetrack. Thresholds of ``inf`` disable
    the corresponding constraint. Exploration schedules must be nonincreasing.
    """

    algorithm: str
    scenario: str
    seed: int = 0
    total_steps: int = 200_000
    horizon: int | None = None
    gamma: float = 0.99
    d1: float = 1.0
    d2: float = 1.0
    actor_lr: float = 1e-3
    critic_lr: float = 1e-3
    lambda_lr: float = 5e-3
    rho: float = 0.995
    buffer_capacity: int = 100_000
    batch_size: int = 128
    update_every: int = 1
    updates_per_step: int = 1
    learning_starts: int = 1_000
    epsilon_start: float = 1.0
    epsilon_end: float = 0.05
    epsilon_decay_steps: int | None = None  # default: half of total_steps
    noise_start: float = 0.2
    noise_end: float = 0.02
    noise_decay_steps: int | None = None
    eval_every: int = 2_000
    eval_episodes: int = 20
    actor_hidden: tuple = (64, 64)
    critic_hidden: tuple = (128, 128)
    a_low: float = -1.0
    a_high: float = 1.0
    out_dir: str = "runs"
    scenario_config: str | None = None

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.algorithm == "csq" and self.scenario not in DISCRETE_SCENARIOS:
            raise ValueError("csq pairs with the discrete-action scenarios "
                             f"{DISCRETE_SCENARIOS}, got {self.scenario!r}")
        if self.algorithm == "cs-maddpg" and self.scenario not in CONTINUOUS_SCENARIOS:
            raise ValueError("cs-maddpg pairs with the continuous-action scenarios "
                             f"{CONTINUOUS_SCENARIOS}, got {self.scenario!r}")
        if self.epsilon_end > self.epsilon_start or self.noise_end > self.noise_start:
            raise ValueError("exploration schedules must be nonincreasing")
        if not 0.0 <= self.gamma < 1.0:
            raise ValueError("gamma must lie in [0, 1)")
        if self.d1 < 0 or self.d2 < 0:
            raise ValueError("thresholds must be nonnegative")
        if math.isnan(self.d1) or math.isnan(self.d2):
            raise ValueError("thresholds must not be NaN")
        self.actor_hidden = tuple(self.actor_hidden)
        self.critic_hidden = tuple(self.critic_hidden)

    @property
    def epsilon_steps(self) -> int:
        return self.epsilon_decay_steps or max(self.total_steps // 2, 1)

    @property
    def noise_steps(self) -> int:
        return self.noise_decay_steps or max(self.total_steps // 2, 1)

    def run_name(self) -> str:
        return f"{self.algorithm}_{self.scenario}_seed{self.seed}"

    def to_dict(self) -> dict:
        raw = asdict(self)
        raw["actor_hidden"] = list(self.actor_hidden)
        raw["critic_hidden"] = list(self.critic_hidden)
        raw["d1"] = "inf" if math.isinf(self.d1) else self.d1
        raw["d2"] = "inf" if math.isinf(self.d2) else self.d2
        return raw


def _from_dict(raw: dict) -> RunConfig:
    raw = dict(raw)
    for key in ("d1", "d2"):
        if isinstance(raw.get(key), str):
            raw[key] = float(raw[key])
    return RunConfig(**raw)


def load_run_config(path) -> RunConfig:
    with open(path, "r", encoding="utf-8") as fh:
        raw = yaml.safe_load(fh)
    if not isinstance(raw, dict):
        raise ValueError("run config must be a mapping")
    return _from_dict(raw)


def save_run_config(cfg: RunConfig, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        yaml.safe_dump(cfg.to_dict(), fh, sort_keys=True)
