"""Executable convergence suite: contraction, fixed point, stochastic learning.

Drives the tabular module's property checks over randomly generated games
and reports per-property pass counts. The game distribution for the
fixed-point and learning properties comes from draw_convergent_game, since
the lemmas presuppose a stably selected stage-game optimum.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import matgame
from ..tabular import (
    bellman_backup,
    contraction_gap,
    csq_tabular_learn,
    draw_convergent_game,
    fixed_point,
    power_schedule,
    random_game,
    random_tables,
)

__all__ = ["PropertyResult", "verify_appendix", "verify_game_file"]


@dataclass
class PropertyResult:
    name: str
    passed: int
    total: int

    @property
    def ok(self) -> bool:
        return self.passed == self.total


def _gamma_for(rng, gamma):
    return float(rng.uniform(0.5, 0.95)) if gamma is None else gamma


def verify_appendix(trials: int = 200, seed: int = 0, gamma: float | None = None):
    """Run all properties; returns a list of PropertyResult."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    results = []

    passed = 0
    for _ in range(trials):
        n1 = int(rng.integers(1, 7))
        n2 = int(rng.integers(1, 7))
        game = matgame.ConstrainedBimatrixGame(
            q1=rng.uniform(-5, 5, (n1, n2)), q2=rng.uniform(-5, 5, (n1, n2)),
            g1=rng.uniform(-5, 5, (n1, n2)), g2=rng.uniform(-5, 5, (n1, n2)),
            d1=float(rng.choice([0.0, 2.5, np.inf])), d2=float(rng.choice([0.0, 2.5, np.inf])),
        )
        sol = matgame.solve_constrained_stackelberg(game)
        if not sol.feasible or matgame.verify_solution(game, sol):
            passed += 1
    results.append(PropertyResult("stage-game solution optimality", passed, trials))

    passed = 0
    for _ in range(trials):
        game = random_game(
            rng, n_states=int(rng.integers(2, 6)), gamma=_gamma_for(rng, gamma),
            d1=2.5, d2=2.5)
        a = random_tables(rng, game)
        b = random_tables(rng, game)
        gap, bound = contraction_gap(game, a, b)
        if gap <= bound + 1e-9:
            passed += 1
    results.append(PropertyResult("backup contraction", passed, trials))

    fp_trials = max(trials // 10, 5)
    tol = 1e-9
    passed = 0
    for _ in range(fp_trials):
        game, tables, _ = draw_convergent_game(
            rng, tol=tol, gamma=0.5 if gamma is None else gamma,
            cost_low=0.0, cost_high=1.0, d1=2.0, d2=2.0,
            deterministic_transitions=True)
        if bellman_backup(game, tables).sup_distance(tables) < 10 * tol:
            passed += 1
    results.append(PropertyResult("fixed point reached", passed, fp_trials))

    st_trials = max(trials // 50, 2)
    passed = 0
    for k in range(st_trials):
        game, target, _ = draw_convergent_game(
            rng, min_margin=0.1, n_states=4, gamma=0.6 if gamma is None else gamma,
            reward_scale=1.0, cost_low=0.0, cost_high=1.0, d1=2.0, d2=2.0)
        early = csq_tabular_learn(game, power_schedule(0.8), samples=1_000, seed=seed + k)
        late = csq_tabular_learn(game, power_schedule(0.8), samples=100_000, seed=seed + k)
        if late.sup_distance(target) < 0.15 and late.sup_distance(target) < early.sup_distance(target):
            passed += 1
    results.append(PropertyResult("stochastic iterates approach fixed point", passed, st_trials))
    return results


def verify_game_file(path) -> tuple:
    """Solve + verify one game file; returns (solution, verified)."""
    game = matgame.load_game_file(path)
    sol = matgame.solve_constrained_stackelberg(game)
    return sol, matgame.verify_solution(game, sol)
