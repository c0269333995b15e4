"""Constrained Stackelberg MADDPG for continuous actions.

The leader actor maps its own observation to an action; the follower actor
sees its observation plus the leader's action, making the decision sequence
hierarchical while execution stays simultaneous. Each agent carries a
centralized reward critic and cost critic; constraint pressure enters the
actors through Lagrange multipliers updated on a slower timescale.

The leader's policy gradient has two routes into its critics: directly
through the a1 input and indirectly through the follower actor's dependence
on a1. Both are materialized here with exact input gradients; the follower
treats a1 as a constant.
"""

from __future__ import annotations

import math

import numpy as np

from .. import nn
from .csq import LinearSchedule
from .replay import Batch

__all__ = [
    "CsMaddpgPair",
    "maddpg_select_actions",
    "maddpg_update_critics",
    "maddpg_update_actors",
    "update_lagrange",
    "lagrange_step",
]


class CsMaddpgPair:
    """Leader/follower actors, four critics, target copies and multipliers."""

    def __init__(self, obs1_dim, obs2_dim, state_dim, act1_dim, act2_dim, *,
                 actor_hidden=(64, 64), critic_hidden=(128, 128),
                 d1=math.inf, d2=math.inf, gamma=0.99,
                 actor_lr=1e-3, critic_lr=1e-3, lambda_lr=1e-3,
                 a_low=-1.0, a_high=1.0,
                 noise_schedule=LinearSchedule(0.2, 0.02, 10_000), rng=None):
        if a_high <= a_low:
            raise ValueError("need a_low < a_high")
        if rng is None:
            rng = np.random.default_rng(0)
        self.obs1_dim = obs1_dim
        self.obs2_dim = obs2_dim
        self.state_dim = state_dim
        self.act1_dim = act1_dim
        self.act2_dim = act2_dim
        self.d1 = float(d1)
        self.d2 = float(d2)
        self.gamma = float(gamma)
        self.a_low = float(a_low)
        self.a_high = float(a_high)
        self.lambda_lr = float(lambda_lr)
        self.lagrange1 = 0.0
        self.lagrange2 = 0.0
        self.noise_schedule = noise_schedule
        self.noise = noise_schedule.value(0)

        self.actor1 = nn.init_mlp([obs1_dim, *actor_hidden, act1_dim], "tanh", rng=rng)
        self.actor2 = nn.init_mlp([obs2_dim + act1_dim, *actor_hidden, act2_dim], "tanh", rng=rng)
        critic_sizes = [state_dim + act1_dim + act2_dim, *critic_hidden, 1]
        self.q1 = nn.init_mlp(critic_sizes, rng=rng)
        self.q2 = nn.init_mlp(critic_sizes, rng=rng)
        self.g1 = nn.init_mlp(critic_sizes, rng=rng)
        self.g2 = nn.init_mlp(critic_sizes, rng=rng)
        self.actor1_target = self.actor1.copy()
        self.actor2_target = self.actor2.copy()
        self.q1_target = self.q1.copy()
        self.q2_target = self.q2.copy()
        self.g1_target = self.g1.copy()
        self.g2_target = self.g2.copy()

        self.opt_actor1 = nn.make_optimizer(self.actor1, "adam", actor_lr)
        self.opt_actor2 = nn.make_optimizer(self.actor2, "adam", actor_lr)
        self.opt_q1 = nn.make_optimizer(self.q1, "adam", critic_lr)
        self.opt_q2 = nn.make_optimizer(self.q2, "adam", critic_lr)
        self.opt_g1 = nn.make_optimizer(self.g1, "adam", critic_lr)
        self.opt_g2 = nn.make_optimizer(self.g2, "adam", critic_lr)

    @property
    def _half_range(self) -> float:
        return 0.5 * (self.a_high - self.a_low)

    @property
    def _mid(self) -> float:
        return 0.5 * (self.a_high + self.a_low)

    def scale_action(self, tanh_out: np.ndarray) -> np.ndarray:
        """Map tanh output in [-1, 1] onto [a_low, a_high]."""
        return self._mid + self._half_range * tanh_out

    def set_step(self, step: int) -> None:
        self.noise = self.noise_schedule.value(step)

    def blend_targets(self, rho: float) -> None:
        self.actor1_target = nn.soft_blend(self.actor1_target, self.actor1, rho)
        self.actor2_target = nn.soft_blend(self.actor2_target, self.actor2, rho)
        self.q1_target = nn.soft_blend(self.q1_target, self.q1, rho)
        self.q2_target = nn.soft_blend(self.q2_target, self.q2, rho)
        self.g1_target = nn.soft_blend(self.g1_target, self.g1, rho)
        self.g2_target = nn.soft_blend(self.g2_target, self.g2, rho)

    def _actor_actions(self, obs1: np.ndarray, obs2: np.ndarray):
        """Deterministic chained actions from the online actors (batched)."""
        obs1 = np.atleast_2d(obs1)
        obs2 = np.atleast_2d(obs2)
        a1 = self.scale_action(self.actor1.forward_batch(obs1))
        a2 = self.scale_action(self.actor2.forward_batch(np.hstack([obs2, a1])))
        return a1, a2


def maddpg_select_actions(pair: CsMaddpgPair, obs1, obs2, explore: bool, rng):
    """Leader acts from obs1; follower sees obs2 plus the executed leader action.

    Gaussian exploration noise is added to each action before clipping; the
    follower conditions on the leader's post-noise, clipped action.
    """
    t1 = nn.forward(pair.actor1, obs1)
    a1 = pair.scale_action(t1)
    if explore:
        a1 = a1 + pair.noise * rng.standard_normal(a1.shape)
    a1 = np.clip(a1, pair.a_low, pair.a_high)
    t2 = nn.forward(pair.actor2, np.concatenate([obs2, a1]))
    a2 = pair.scale_action(t2)
    if explore:
        a2 = a2 + pair.noise * rng.standard_normal(a2.shape)
    a2 = np.clip(a2, pair.a_low, pair.a_high)
    return a1, a2


def maddpg_update_critics(pair: CsMaddpgPair, batch: Batch):
    """TD step for the four critics with target-actor target actions."""
    a1n = pair.scale_action(pair.actor1_target.forward_batch(batch.next_obs1))
    a2n = pair.scale_action(
        pair.actor2_target.forward_batch(np.hstack([batch.next_obs2, a1n])))
    enc_next = np.hstack([batch.next_state, a1n, a2n])
    mask = pair.gamma * (1.0 - batch.done)
    y1 = batch.r1 + mask * pair.q1_target.forward_batch(enc_next)[:, 0]
    y2 = batch.r2 + mask * pair.q2_target.forward_batch(enc_next)[:, 0]
    z1 = batch.c1 + mask * pair.g1_target.forward_batch(enc_next)[:, 0]
    z2 = batch.c2 + mask * pair.g2_target.forward_batch(enc_next)[:, 0]

    enc = np.hstack([batch.state, batch.a1, batch.a2])
    from .csq import _critic_step

    return (
        _critic_step(pair.q1, pair.opt_q1, enc, y1),
        _critic_step(pair.q2, pair.opt_q2, enc, y2),
        _critic_step(pair.g1, pair.opt_g1, enc, z1),
        _critic_step(pair.g2, pair.opt_g2, enc, z2),
    )


def _penalty(lam: float, mean_g: float, d: float) -> float:
    return lam * (mean_g - d) if lam > 0.0 else 0.0


def actor_gradients(pair: CsMaddpgPair, batch: Batch):
    """Ascent gradients for both actors plus batch-mean Lagrangian values.

    Gradients are taken simultaneously at the current parameters: the leader
    combines the direct critic route with the route through the follower
    actor; the follower differentiates only through its own action input.
    """
    B = len(batch)
    half = pair._half_range
    Y1, cache1 = nn.forward_with_cache(pair.actor1, batch.obs1)
    a1 = pair.scale_action(Y1)
    X2 = np.hstack([batch.obs2, a1])
    Y2, cache2 = nn.forward_with_cache(pair.actor2, X2)
    a2 = pair.scale_action(Y2)
    enc = np.hstack([batch.state, a1, a2])

    sd, d1a = pair.state_dim, pair.act1_dim
    q1v, dq1 = pair.q1.value_and_input_grad(enc)
    q2v, dq2 = pair.q2.value_and_input_grad(enc)
    g1v, dg1 = pair.g1.value_and_input_grad(enc)
    g2v, dg2 = pair.g2.value_and_input_grad(enc)

    # Leader: dL1/da1 direct part and dL1/da2 to be chained through actor2.
    v_a1 = dq1[:, sd:sd + d1a] - pair.lagrange1 * dg1[:, sd:sd + d1a]
    v_a2 = dq1[:, sd + d1a:] - pair.lagrange1 * dg1[:, sd + d1a:]
    _, dX2 = nn.backward_from_cache(pair.actor2, cache2, Y2, v_a2 * half)
    total_a1 = v_a1 + dX2[:, pair.obs2_dim:]
    grads1, _ = nn.backward_from_cache(pair.actor1, cache1, Y1, total_a1 * half / B)

    # Follower: a1 held constant, only the a2 route.
    w_a2 = dq2[:, sd + d1a:] - pair.lagrange2 * dg2[:, sd + d1a:]
    grads2, _ = nn.backward_from_cache(pair.actor2, cache2, Y2, w_a2 * half / B)

    l1 = float(np.mean(q1v)) - _penalty(pair.lagrange1, float(np.mean(g1v)), pair.d1)
    l2 = float(np.mean(q2v)) - _penalty(pair.lagrange2, float(np.mean(g2v)), pair.d2)
    return grads1, grads2, l1, l2


def maddpg_update_actors(pair: CsMaddpgPair, batch: Batch):
    """One simultaneous ascent step on both actors; returns (L1, L2)."""
    grads1, grads2, l1, l2 = actor_gradients(pair, batch)
    nn.apply_update(pair.actor1, pair.opt_actor1, grads1, "ascent")
    nn.apply_update(pair.actor2, pair.opt_actor2, grads2, "ascent")
    return l1, l2


def lagrange_step(lam: float, violation: float, beta: float) -> float:
    """Projected multiplier step: grow with violation, shrink when satisfied."""
    return max(0.0, lam + beta * violation)


def update_lagrange(pair: CsMaddpgPair, batch: Batch):
    """Move each multiplier along its batch-mean constraint violation.

    Violations are measured by the cost critics at the current actors'
    actions; projection keeps both multipliers nonnegative (an infinite
    threshold pins its multiplier at zero).
    """
    a1, a2 = pair._actor_actions(batch.obs1, batch.obs2)
    enc = np.hstack([batch.state, a1, a2])
    mean_g1 = float(np.mean(pair.g1.forward_batch(enc)[:, 0]))
    mean_g2 = float(np.mean(pair.g2.forward_batch(enc)[:, 0]))
    pair.lagrange1 = lagrange_step(pair.lagrange1, mean_g1 - pair.d1, pair.lambda_lr)
    pair.lagrange2 = lagrange_step(pair.lagrange2, mean_g2 - pair.d2, pair.lambda_lr)
    return pair.lagrange1, pair.lagrange2
