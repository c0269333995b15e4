"""Constrained Stackelberg Q-learning over discrete joint actions.

Four centralized critics per pair (reward and cost, per agent) score joint
actions encoded as the global state plus a one-hot per agent. Action
selection enumerates the full joint action set, builds the stage game, and
delegates to the matgame solver; infeasible actions are vetoed there rather
than penalized.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import _core, matgame, nn
from .replay import Batch

__all__ = ["LinearSchedule", "CsqPair", "csq_select_actions", "csq_update"]


@dataclass(frozen=True)
class LinearSchedule:
    """Linear interpolation from start to end over decay_steps, then flat."""

    start: float
    end: float
    decay_steps: int

    def __post_init__(self):
        if self.end > self.start:
            raise ValueError("schedule must be nonincreasing")
        if self.decay_steps < 1:
            raise ValueError("decay_steps must be positive")

    def value(self, step: int) -> float:
        frac = min(max(step, 0), self.decay_steps) / self.decay_steps
        return self.start + frac * (self.end - self.start)


class CsqPair:
    """Online and target reward/cost critics plus thresholds and schedules."""

    def __init__(self, state_dim, n_actions1, n_actions2, *, hidden=(128, 128),
                 d1=np.inf, d2=np.inf, gamma=0.99, learning_rate=1e-3,
                 epsilon_schedule=LinearSchedule(1.0, 0.05, 10_000), rng=None):
        if rng is None:
            rng = np.random.default_rng(0)
        self.state_dim = state_dim
        self.n_actions1 = n_actions1
        self.n_actions2 = n_actions2
        self.d1 = float(d1)
        self.d2 = float(d2)
        self.gamma = float(gamma)
        self.epsilon_schedule = epsilon_schedule
        self.epsilon = epsilon_schedule.value(0)

        sizes = [state_dim + n_actions1 + n_actions2, *hidden, 1]
        self.q1 = nn.init_mlp(sizes, rng=rng)
        self.q2 = nn.init_mlp(sizes, rng=rng)
        self.g1 = nn.init_mlp(sizes, rng=rng)
        self.g2 = nn.init_mlp(sizes, rng=rng)
        self.q1_target = self.q1.copy()
        self.q2_target = self.q2.copy()
        self.g1_target = self.g1.copy()
        self.g2_target = self.g2.copy()
        self.opt_q1 = nn.make_optimizer(self.q1, "adam", learning_rate)
        self.opt_q2 = nn.make_optimizer(self.q2, "adam", learning_rate)
        self.opt_g1 = nn.make_optimizer(self.g1, "adam", learning_rate)
        self.opt_g2 = nn.make_optimizer(self.g2, "adam", learning_rate)

        # Joint-action one-hot block, one row per (a1, a2) in row-major order.
        eye1 = np.eye(n_actions1)
        eye2 = np.eye(n_actions2)
        self._pair_onehot = np.hstack([
            np.repeat(eye1, n_actions2, axis=0),
            np.tile(eye2, (n_actions1, 1)),
        ])

    def set_step(self, step: int) -> None:
        self.epsilon = self.epsilon_schedule.value(step)

    def encode(self, states: np.ndarray, a1: np.ndarray, a2: np.ndarray) -> np.ndarray:
        """Stack [state, onehot(a1), onehot(a2)] rows."""
        states = np.atleast_2d(states)
        B = states.shape[0]
        enc = np.zeros((B, self.state_dim + self.n_actions1 + self.n_actions2))
        enc[:, : self.state_dim] = states
        enc[np.arange(B), self.state_dim + np.asarray(a1)] = 1.0
        enc[np.arange(B), self.state_dim + self.n_actions1 + np.asarray(a2)] = 1.0
        return enc

    def enumerate_values(self, states: np.ndarray):
        """All four critics over every joint action; four (B, A1, A2) arrays."""
        states = np.atleast_2d(states)
        B = states.shape[0]
        n_pairs = self.n_actions1 * self.n_actions2
        enc = np.empty((B * n_pairs, self.state_dim + self._pair_onehot.shape[1]))
        enc[:, : self.state_dim] = np.repeat(states, n_pairs, axis=0)
        enc[:, self.state_dim:] = np.tile(self._pair_onehot, (B, 1))
        shape = (B, self.n_actions1, self.n_actions2)
        return tuple(
            net.forward_batch(enc)[:, 0].reshape(shape)
            for net in (self.q1, self.q2, self.g1, self.g2)
        )

    def enumerate_values_fast(self, states: np.ndarray):
        """Single-precision variant of enumerate_values for argmax-type use.

        Target-action selection only compares critic values, so evaluating
        the enumeration in float32 (about 4x cheaper at training batch
        sizes) changes decisions only at sub-1e-6 ties. Value targets keep
        full precision: the caller re-evaluates the chosen pairs in f64.
        """
        states = np.atleast_2d(states)
        B = states.shape[0]
        n_pairs = self.n_actions1 * self.n_actions2
        enc = np.empty((B * n_pairs, self.state_dim + self._pair_onehot.shape[1]),
                       dtype=np.float32)
        enc[:, : self.state_dim] = np.repeat(states.astype(np.float32), n_pairs, axis=0)
        enc[:, self.state_dim:] = np.tile(self._pair_onehot.astype(np.float32), (B, 1))
        shape = (B, self.n_actions1, self.n_actions2)
        out = []
        for net in (self.q1, self.q2, self.g1, self.g2):
            h = enc
            last = len(net.weights) - 1
            for l, (w, b) in enumerate(zip(net.weights, net.biases)):
                h = h @ w.astype(np.float32) + b.astype(np.float32)
                if l < last:
                    h = np.tanh(h)
            out.append(h[:, 0].reshape(shape).astype(np.float64))
        return tuple(out)

    def blend_targets(self, rho: float) -> None:
        self.q1_target = nn.soft_blend(self.q1_target, self.q1, rho)
        self.q2_target = nn.soft_blend(self.q2_target, self.q2, rho)
        self.g1_target = nn.soft_blend(self.g1_target, self.g1, rho)
        self.g2_target = nn.soft_blend(self.g2_target, self.g2, rho)


def csq_select_actions(pair: CsqPair, state: np.ndarray, explore: bool, rng):
    """Solve the critics' stage game at one state; epsilon-greedy when exploring.

    Exploration replaces the pair with a uniform draw from the feasible joint
    actions (both cost critics under threshold) when that set is nonempty,
    otherwise from all joint actions. Returns (a1, a2, feasible) with the
    feasibility flag from the solved game.
    """
    q1v, q2v, g1v, g2v = (m[0] for m in pair.enumerate_values(state))
    a1, a2, feasible = matgame.solve_arrays(q1v, q2v, g1v, g2v, pair.d1, pair.d2)
    if explore and rng.random() < pair.epsilon:
        mask = (g1v <= pair.d1) & (g2v <= pair.d2)
        candidates = np.argwhere(mask) if mask.any() else np.argwhere(np.ones_like(mask))
        pick = candidates[rng.integers(len(candidates))]
        a1, a2 = int(pick[0]), int(pick[1])
    return int(a1), int(a2), bool(feasible)


def _critic_step(net, opt, enc, target):
    pred, cache = nn.forward_with_cache(net, enc)
    err = pred[:, 0] - target
    loss = float(np.mean(err * err))
    upstream = (2.0 / len(target)) * err[:, None]
    grads, _ = nn.backward_from_cache(net, cache, pred, upstream)
    nn.apply_update(net, opt, grads, "descent")
    return loss


def csq_update(pair: CsqPair, batch: Batch):
    """One TD step on all four critics; returns the pre-step losses.

    Target joint actions come from the online critics' stage game at the
    next state; target values come from the target critics, masked by
    (1 - done).
    """
    q1n, q2n, g1n, g2n = pair.enumerate_values_fast(batch.next_state)
    a1n, a2n, _ = _core.solve_games_batch(q1n, q2n, g1n, g2n, pair.d1, pair.d2)
    enc_next = pair.encode(batch.next_state, a1n, a2n)
    mask = pair.gamma * (1.0 - batch.done)
    y1 = batch.r1 + mask * pair.q1_target.forward_batch(enc_next)[:, 0]
    y2 = batch.r2 + mask * pair.q2_target.forward_batch(enc_next)[:, 0]
    z1 = batch.c1 + mask * pair.g1_target.forward_batch(enc_next)[:, 0]
    z2 = batch.c2 + mask * pair.g2_target.forward_batch(enc_next)[:, 0]

    enc = pair.encode(batch.state, batch.a1, batch.a2)
    return (
        _critic_step(pair.q1, pair.opt_q1, enc, y1),
        _critic_step(pair.q2, pair.opt_q2, enc, y2),
        _critic_step(pair.g1, pair.opt_g1, enc, z1),
        _critic_step(pair.g2, pair.opt_g2, enc, z2),
    )
