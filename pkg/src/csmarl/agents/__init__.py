"""Training algorithms: CSQ (discrete) and CS-MADDPG (continuous)."""

from .chain import chain_decisions
from .cs_maddpg import (
    CsMaddpgPair,
    actor_gradients,
    lagrange_step,
    maddpg_select_actions,
    maddpg_update_actors,
    maddpg_update_critics,
    update_lagrange,
)
from .csq import CsqPair, LinearSchedule, csq_select_actions, csq_update
from .replay import Batch, ReplayBuffer, Transition

__all__ = [
    "Batch",
    "ReplayBuffer",
    "Transition",
    "CsqPair",
    "LinearSchedule",
    "csq_select_actions",
    "csq_update",
    "CsMaddpgPair",
    "actor_gradients",
    "lagrange_step",
    "maddpg_select_actions",
    "maddpg_update_actors",
    "maddpg_update_critics",
    "update_lagrange",
    "chain_decisions",
]
