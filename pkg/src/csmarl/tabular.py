"""Finite constrained Markov games and the constrained Stackelberg backup.

The backup operator replaces the usual max with the constrained Stackelberg
pair of the next state's stage game, for reward and cost tables alike. This
module keeps two routes to the same object deliberately separate: the exact
expectation operator (`bellman_backup` / `fixed_point`) and the stochastic
sample-based learner (`csq_tabular_learn`), so the learner can be checked
against the fixed point it is supposed to approach.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import matgame

__all__ = [
    "FiniteConstrainedMarkovGame",
    "JointQTables",
    "NonConvergence",
    "equilibrium_values",
    "bellman_backup",
    "fixed_point",
    "contraction_gap",
    "power_schedule",
    "csq_tabular_learn",
    "selection_margin",
    "draw_convergent_game",
    "random_game",
    "random_tables",
]


class NonConvergence(RuntimeError):
    """fixed_point hit max_iter with the residual still above tolerance."""

    def __init__(self, residual: float, iterations: int):
        super().__init__(f"no fixed point after {iterations} iterations (residual {residual:.3e})")
        self.residual = residual
        self.iterations = iterations


@dataclass
class FiniteConstrainedMarkovGame:
    """Two-player game over finite states with per-player rewards and costs.

    Reward/cost tensors are [S, A1, A2]; transition is [S, A1, A2, S] with
    rows summing to one. gamma < 1 is the contraction modulus.
    """

    rewards1: np.ndarray
    rewards2: np.ndarray
    costs1: np.ndarray
    costs2: np.ndarray
    transition: np.ndarray
    gamma: float
    d1: float = math.inf
    d2: float = math.inf

    def __post_init__(self):
        for name in ("rewards1", "rewards2", "costs1", "costs2", "transition"):
            setattr(self, name, np.asarray(getattr(self, name), dtype=float))
        shape = self.rewards1.shape
        if len(shape) != 3:
            raise ValueError("reward tensors must be [S, A1, A2]")
        for name in ("rewards2", "costs1", "costs2"):
            if getattr(self, name).shape != shape:
                raise ValueError(f"{name} shape mismatch")
        if self.transition.shape != shape + (shape[0],):
            raise ValueError("transition must be [S, A1, A2, S]")
        if np.any(self.transition < 0):
            raise ValueError("transition probabilities must be nonnegative")
        if not np.allclose(self.transition.sum(axis=3), 1.0, atol=1e-9):
            raise ValueError("each transition distribution must sum to 1 within 1e-9")
        if not 0.0 <= self.gamma < 1.0:
            raise ValueError("gamma must lie in [0, 1)")

    @property
    def n_states(self) -> int:
        return self.rewards1.shape[0]

    @property
    def n_actions1(self) -> int:
        return self.rewards1.shape[1]

    @property
    def n_actions2(self) -> int:
        return self.rewards1.shape[2]


@dataclass
class JointQTables:
    """Reward and cost Q tables over (state, a1, a2) for both players."""

    q1: np.ndarray
    q2: np.ndarray
    g1: np.ndarray
    g2: np.ndarray

    def __post_init__(self):
        shape = self.q1.shape
        for name in ("q2", "g1", "g2"):
            if getattr(self, name).shape != shape:
                raise ValueError(f"{name} shape mismatch")

    @classmethod
    def zeros(cls, game: FiniteConstrainedMarkovGame) -> "JointQTables":
        shape = game.rewards1.shape
        return cls(*(np.zeros(shape) for _ in range(4)))

    def copy(self) -> "JointQTables":
        return JointQTables(self.q1.copy(), self.q2.copy(), self.g1.copy(), self.g2.copy())

    def sup_distance(self, other: "JointQTables") -> float:
        """Max absolute entry difference across all four tables."""
        return max(
            float(np.max(np.abs(self.q1 - other.q1))),
            float(np.max(np.abs(self.q2 - other.q2))),
            float(np.max(np.abs(self.g1 - other.g1))),
            float(np.max(np.abs(self.g2 - other.g2))),
        )


def _state_pair(tables: JointQTables, state: int, d1: float, d2: float):
    return matgame.solve_arrays(
        tables.q1[state], tables.q2[state], tables.g1[state], tables.g2[state], d1, d2
    )


def equilibrium_values(
    tables: JointQTables, state: int, d1: float = math.inf, d2: float = math.inf
) -> tuple[float, float]:
    """Both players' reward values at the state's constrained Stackelberg pair."""
    i, j, _ = _state_pair(tables, state, d1, d2)
    return float(tables.q1[state, i, j]), float(tables.q2[state, i, j])


def _equilibrium_value_vectors(game: FiniteConstrainedMarkovGame, tables: JointQTables):
    """Per-state equilibrium values for rewards and costs, one solve per state."""
    S = game.n_states
    v1 = np.empty(S)
    v2 = np.empty(S)
    w1 = np.empty(S)
    w2 = np.empty(S)
    for s in range(S):
        i, j, _ = _state_pair(tables, s, game.d1, game.d2)
        v1[s] = tables.q1[s, i, j]
        v2[s] = tables.q2[s, i, j]
        w1[s] = tables.g1[s, i, j]
        w2[s] = tables.g2[s, i, j]
    return v1, v2, w1, w2


def bellman_backup(game: FiniteConstrainedMarkovGame, tables: JointQTables) -> JointQTables:
    """One application of the constrained Stackelberg backup; inputs unchanged.

    The cost tables bootstrap through the same per-state pair as the reward
    tables: one joint policy drives both value families.
    """
    v1, v2, w1, w2 = _equilibrium_value_vectors(game, tables)
    T = game.transition
    return JointQTables(
        q1=game.rewards1 + game.gamma * (T @ v1),
        q2=game.rewards2 + game.gamma * (T @ v2),
        g1=game.costs1 + game.gamma * (T @ w1),
        g2=game.costs2 + game.gamma * (T @ w2),
    )


def fixed_point(
    game: FiniteConstrainedMarkovGame, tol: float = 1e-10, max_iter: int = 10_000
) -> tuple[JointQTables, int]:
    """Iterate the backup from zero tables until the sup-norm change < tol.

    Returns (tables, iterations). Raises NonConvergence when max_iter is
    exhausted with the residual still above tol.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    tables = JointQTables.zeros(game)
    for it in range(1, max_iter + 1):
        new = bellman_backup(game, tables)
        residual = new.sup_distance(tables)
        tables = new
        if residual < tol:
            return tables, it
    raise NonConvergence(residual, max_iter)


def contraction_gap(
    game: FiniteConstrainedMarkovGame, tables_a: JointQTables, tables_b: JointQTables
) -> tuple[float, float]:
    """(sup-norm of P(A)-P(B) on the reward tables, gamma * sup-norm of A-B).

    The second component uses the joint norm over all four tables, since the
    backup's pair selection reads the cost tables too. The property suite
    asserts first <= second + 1e-9.
    """
    pa = bellman_backup(game, tables_a)
    pb = bellman_backup(game, tables_b)
    gap = max(
        float(np.max(np.abs(pa.q1 - pb.q1))),
        float(np.max(np.abs(pa.q2 - pb.q2))),
    )
    return gap, game.gamma * tables_a.sup_distance(tables_b)


def power_schedule(omega: float):
    """Robbins-Monro rate alpha_k = 1/(k+1)^omega over per-cell visit counts."""
    if not 0.5 < omega <= 1.0:
        raise ValueError("omega must lie in (0.5, 1]")
    return lambda k: (k + 1.0) ** (-omega)


def csq_tabular_learn(
    game: FiniteConstrainedMarkovGame,
    schedule,
    samples: int,
    seed: int,
) -> JointQTables:
    """Asynchronous sample-based learning under uniformly random exploration.

    Each step draws a uniform joint action at the current state, samples the
    next state from the game's transition kernel, and moves the visited cell
    toward r + gamma * (equilibrium value at the next state) with step size
    schedule(prior visits of that cell). Costs update through the same pair.
    """
    rng = np.random.default_rng(seed)
    tables = JointQTables.zeros(game)
    q1, q2, g1, g2 = tables.q1, tables.q2, tables.g1, tables.g2
    r1, r2, c1, c2 = game.rewards1, game.rewards2, game.costs1, game.costs2
    counts = np.zeros(game.rewards1.shape, dtype=np.int64)
    cum = np.cumsum(game.transition, axis=3)
    gamma, d1, d2 = game.gamma, game.d1, game.d2
    nA1, nA2 = game.n_actions1, game.n_actions2

    s = int(rng.integers(game.n_states))
    for _ in range(samples):
        a1 = int(rng.integers(nA1))
        a2 = int(rng.integers(nA2))
        s2 = int(np.searchsorted(cum[s, a1, a2], rng.random(), side="right"))
        i, j, _ = matgame.solve_arrays(q1[s2], q2[s2], g1[s2], g2[s2], d1, d2)
        alpha = schedule(counts[s, a1, a2])
        counts[s, a1, a2] += 1
        q1[s, a1, a2] += alpha * (r1[s, a1, a2] + gamma * q1[s2, i, j] - q1[s, a1, a2])
        q2[s, a1, a2] += alpha * (r2[s, a1, a2] + gamma * q2[s2, i, j] - q2[s, a1, a2])
        g1[s, a1, a2] += alpha * (c1[s, a1, a2] + gamma * g1[s2, i, j] - g1[s, a1, a2])
        g2[s, a1, a2] += alpha * (c2[s, a1, a2] + gamma * g2[s2, i, j] - g2[s, a1, a2])
        s = s2
    return tables


def selection_margin(game: FiniteConstrainedMarkovGame, tables: JointQTables) -> float:
    """How far the per-state pair selection sits from any decision boundary.

    Minimum over states of: distance of every cost entry to its threshold,
    the follower's top-two feasible payoff gap per leader row, and the
    leader's top-two gap across feasible rows. Large margins mean the
    selected equilibrium is stable under small table perturbations; the
    convergence suite screens on this because stage games with near-ties
    admit multiple consistent selections.
    """
    margin = math.inf
    for s in range(game.n_states):
        q1, q2 = tables.q1[s], tables.q2[s]
        g1, g2 = tables.g1[s], tables.g2[s]
        if math.isfinite(game.d1):
            margin = min(margin, float(np.min(np.abs(g1 - game.d1))))
        if math.isfinite(game.d2):
            margin = min(margin, float(np.min(np.abs(g2 - game.d2))))
        leader_vals = []
        for i in range(q1.shape[0]):
            feas = g2[i] <= game.d2
            if feas.any():
                vals = np.sort(q2[i][feas])[::-1]
                if len(vals) > 1:
                    margin = min(margin, float(vals[0] - vals[1]))
                reply = int(np.argmax(np.where(feas, q2[i], -np.inf)))
            else:
                reply = int(np.argmin(g2[i]))
            if g1[i, reply] <= game.d1:
                leader_vals.append(q1[i, reply])
        if len(leader_vals) > 1:
            vals = np.sort(np.asarray(leader_vals))[::-1]
            margin = min(margin, float(vals[0] - vals[1]))
    return margin


def draw_convergent_game(
    rng,
    *,
    tol: float = 1e-10,
    max_iter: int = 2000,
    min_margin: float = 0.0,
    max_attempts: int = 500,
    **generator_kwargs,
):
    """Sample random games until the backup iteration genuinely converges.

    General-sum constrained Stackelberg iteration is not a contraction for
    every game (pair selection can cycle through argmax or feasibility
    flips); the convergence lemmas presuppose a stably selected optimum.
    Returns (game, fixed tables, iterations) for the first draw that reaches
    a fixed point with at least ``min_margin`` of selection slack.
    """
    for _ in range(max_attempts):
        game = random_game(rng, **generator_kwargs)
        try:
            tables, iters = fixed_point(game, tol=tol, max_iter=max_iter)
        except NonConvergence:
            continue
        if min_margin > 0.0 and selection_margin(game, tables) < min_margin:
            continue
        return game, tables, iters
    raise RuntimeError(f"no convergent game found in {max_attempts} attempts")


def random_game(
    rng,
    n_states: int = 4,
    n_actions1: int = 2,
    n_actions2: int = 2,
    gamma: float = 0.9,
    reward_scale: float = 5.0,
    cost_low: float = -5.0,
    cost_high: float = 5.0,
    d1: float = math.inf,
    d2: float = math.inf,
    deterministic_transitions: bool = False,
) -> FiniteConstrainedMarkovGame:
    """Random dense game used by the property suites and the verify CLI."""
    shape = (n_states, n_actions1, n_actions2)
    if deterministic_transitions:
        T = np.zeros(shape + (n_states,))
        targets = rng.integers(n_states, size=shape)
        for s in range(n_states):
            for a1 in range(n_actions1):
                for a2 in range(n_actions2):
                    T[s, a1, a2, targets[s, a1, a2]] = 1.0
    else:
        T = rng.uniform(0.05, 1.0, size=shape + (n_states,))
        T /= T.sum(axis=3, keepdims=True)
    return FiniteConstrainedMarkovGame(
        rewards1=rng.uniform(-reward_scale, reward_scale, size=shape),
        rewards2=rng.uniform(-reward_scale, reward_scale, size=shape),
        costs1=rng.uniform(cost_low, cost_high, size=shape),
        costs2=rng.uniform(cost_low, cost_high, size=shape),
        transition=T,
        gamma=gamma,
        d1=d1,
        d2=d2,
    )


def random_tables(rng, game: FiniteConstrainedMarkovGame, scale: float = 5.0) -> JointQTables:
    shape = game.rewards1.shape
    return JointQTables(*(rng.uniform(-scale, scale, size=shape) for _ in range(4)))
