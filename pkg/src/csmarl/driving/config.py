"""Scenario geometry/constants file: versioned key-value + arrays (YAML)."""

from __future__ import annotations

import copy
import functools
from importlib import resources

import yaml

CONFIG_VERSION = 1

__all__ = ["load_scenario_config", "default_scenario_config", "CONFIG_VERSION"]


def _validate(cfg: dict) -> dict:
    if not isinstance(cfg, dict):
        raise ValueError("scenario config must be a mapping")
    if cfg.get("version") != CONFIG_VERSION:
        raise ValueError(f"unsupported scenario config version {cfg.get('version')!r}")
    for section in ("common", "merge", "roundabout", "intersection", "racetrack"):
        if section not in cfg:
            raise ValueError(f"scenario config missing section {section!r}")
    return cfg


@functools.lru_cache(maxsize=1)
def _default_config_cached() -> dict:
    text = resources.files("csmarl.driving").joinpath("default_scenarios.yaml").read_text()
    return _validate(yaml.safe_load(text))


def default_scenario_config() -> dict:
    # Deep copy so callers may tweak constants without poisoning the cache.
    return copy.deepcopy(_default_config_cached())


def load_scenario_config(path=None) -> dict:
    if path is None:
        return default_scenario_config()
    with open(path, "r", encoding="utf-8") as fh:
        return _validate(yaml.safe_load(fh))
