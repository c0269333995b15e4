"""Decision chaining for more than two agents.

Vertical mode deepens the hierarchy: agent k acts on its observation plus
every earlier action. Horizontal mode keeps two levels wide: all leaders act
from observations alone, then every follower sees its observation plus all
leader actions.
"""

from __future__ import annotations

import numpy as np

from .. import nn

__all__ = ["chain_decisions"]


def _act(actor, x, a_low, a_high):
    out = nn.forward(actor, x)
    mid = 0.5 * (a_high + a_low)
    half = 0.5 * (a_high - a_low)
    return mid + half * out


def chain_decisions(actors, observations, mode: str, *, a_low=-1.0, a_high=1.0,
                    n_leaders: int | None = None):
    """Run an ordered list of actors under one chaining discipline.

    Actors are tanh-output networks whose input sizes must match the chaining
    mode; a mismatch raises through the forward pass as a configuration
    error. Returns actions in agent order.
    """
    if mode not in ("vertical", "horizontal"):
        raise ValueError(f"mode must be 'vertical' or 'horizontal', got {mode!r}")
    if len(actors) != len(observations):
        raise ValueError("one observation per actor required")

    if mode == "vertical":
        actions = []
        for actor, obs in zip(actors, observations):
            x = np.concatenate([obs, *actions]) if actions else np.asarray(obs, float)
            actions.append(_act(actor, x, a_low, a_high))
        return actions

    if n_leaders is None:
        n_leaders = len(actors) // 2
    if not 0 < n_leaders < len(actors):
        raise ValueError("horizontal mode needs at least one leader and one follower")
    leader_actions = [
        _act(actor, np.asarray(obs, float), a_low, a_high)
        for actor, obs in zip(actors[:n_leaders], observations[:n_leaders])
    ]
    follower_actions = [
        _act(actor, np.concatenate([obs, *leader_actions]), a_low, a_high)
        for actor, obs in zip(actors[n_leaders:], observations[n_leaders:])
    ]
    return leader_actions + follower_actions
