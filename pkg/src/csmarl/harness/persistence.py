"""Agent-pair checkpointing on top of the manifest+blob container."""

from __future__ import annotations

import math

import numpy as np

from ..agents import CsMaddpgPair, CsqPair, LinearSchedule
from ..checkpoint import load_checkpoint, save_checkpoint

__all__ = ["save_pair", "load_pair"]

_CSQ_NETS = ("q1", "q2", "g1", "g2", "q1_target", "q2_target", "g1_target", "g2_target")
_MADDPG_NETS = ("actor1", "actor2") + _CSQ_NETS + ("actor1_target", "actor2_target")


def _enc_threshold(d: float):
    return "inf" if math.isinf(d) else float(d)


def _dec_threshold(d) -> float:
    return float(d)


def save_pair(path, pair, *, algorithm: str, scenario: str, step: int) -> None:
    if algorithm == "csq":
        names = _CSQ_NETS
        extras = {
            "algorithm": algorithm, "scenario": scenario, "step": step,
            "state_dim": pair.state_dim,
            "n_actions1": pair.n_actions1, "n_actions2": pair.n_actions2,
            "gamma": pair.gamma, "epsilon": pair.epsilon,
            "d1": _enc_threshold(pair.d1), "d2": _enc_threshold(pair.d2),
        }
    elif algorithm == "cs-maddpg":
        names = _MADDPG_NETS
        extras = {
            "algorithm": algorithm, "scenario": scenario, "step": step,
            "obs1_dim": pair.obs1_dim, "obs2_dim": pair.obs2_dim,
            "state_dim": pair.state_dim,
            "act1_dim": pair.act1_dim, "act2_dim": pair.act2_dim,
            "gamma": pair.gamma, "noise": pair.noise,
            "a_low": pair.a_low, "a_high": pair.a_high,
            "lambda1": pair.lagrange1, "lambda2": pair.lagrange2,
            "d1": _enc_threshold(pair.d1), "d2": _enc_threshold(pair.d2),
        }
    else:
        raise ValueError(f"cannot checkpoint algorithm {algorithm!r}")
    save_checkpoint(path, {name: getattr(pair, name) for name in names}, extras)


def load_pair(path):
    """Rebuild a trained pair from a checkpoint; returns (pair, extras)."""
    nets, extras = load_checkpoint(path)
    algorithm = extras["algorithm"]
    rng = np.random.default_rng(0)
    if algorithm == "csq":
        hidden = tuple(nets["q1"].layer_sizes[1:-1])
        pair = CsqPair(
            extras["state_dim"], extras["n_actions1"], extras["n_actions2"],
            hidden=hidden, d1=_dec_threshold(extras["d1"]), d2=_dec_threshold(extras["d2"]),
            gamma=extras["gamma"], rng=rng,
        )
        pair.epsilon = extras.get("epsilon", 0.0)
    elif algorithm == "cs-maddpg":
        pair = CsMaddpgPair(
            extras["obs1_dim"], extras["obs2_dim"], extras["state_dim"],
            extras["act1_dim"], extras["act2_dim"],
            actor_hidden=tuple(nets["actor1"].layer_sizes[1:-1]),
            critic_hidden=tuple(nets["q1"].layer_sizes[1:-1]),
            d1=_dec_threshold(extras["d1"]), d2=_dec_threshold(extras["d2"]),
            gamma=extras["gamma"], a_low=extras["a_low"], a_high=extras["a_high"],
            noise_schedule=LinearSchedule(max(extras.get("noise", 0.0), 1e-9) + 1e-9, 1e-9, 1),
            rng=rng,
        )
        pair.noise = extras.get("noise", 0.0)
        pair.lagrange1 = extras.get("lambda1", 0.0)
        pair.lagrange2 = extras.get("lambda2", 0.0)
    else:
        raise ValueError(f"unknown checkpoint algorithm {algorithm!r}")
    for name, net in nets.items():
        setattr(pair, name, net)
    return pair, extras
