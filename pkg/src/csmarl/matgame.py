"""Exact constrained Stackelberg equilibria of two-player bimatrix games.

The leader commits to a row, the follower best-responds with a column, and
each side only considers actions whose cost entry stays under its threshold.
Enumeration over pure action pairs gives the exact equilibrium; this module
is the decision kernel shared by CSQ action selection and the tabular
Bellman operator.

Conventions (fixed so results are reproducible):
  * ties are broken toward the lowest action index at both levels;
  * if a feasible set is empty, the minimum-cost action is returned and the
    solution is flagged infeasible instead of raising.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ConstrainedBimatrixGame",
    "StackelbergSolution",
    "follower_best_response",
    "solve_arrays",
    "solve_constrained_stackelberg",
    "verify_solution",
    "parse_game_text",
    "format_game_text",
    "load_game_file",
]


@dataclass(frozen=True)
class ConstrainedBimatrixGame:
    """One-shot two-player game with per-player payoffs, costs and thresholds.

    All four matrices are indexed [leader_action, follower_action] and must
    share one shape. Thresholds may be ``math.inf`` for the unconstrained
    case; matrix entries must be finite.
    """

    q1: np.ndarray
    q2: np.ndarray
    g1: np.ndarray
    g2: np.ndarray
    d1: float = math.inf
    d2: float = math.inf

    def __post_init__(self):
        for name in ("q1", "q2", "g1", "g2"):
            arr = np.asarray(getattr(self, name), dtype=float)
            object.__setattr__(self, name, arr)
        shape = self.q1.shape
        if len(shape) != 2 or shape[0] < 1 or shape[1] < 1:
            raise ValueError(f"game matrices must be 2-D and non-empty, got {shape}")
        for name in ("q2", "g1", "g2"):
            if getattr(self, name).shape != shape:
                raise ValueError(f"{name} shape {getattr(self, name).shape} != q1 shape {shape}")
        for name in ("q1", "q2", "g1", "g2"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise ValueError(f"{name} contains non-finite entries")
        if math.isnan(self.d1) or math.isnan(self.d2):
            raise ValueError("thresholds must not be NaN")

    @property
    def n1(self) -> int:
        return self.q1.shape[0]

    @property
    def n2(self) -> int:
        return self.q1.shape[1]


@dataclass(frozen=True)
class StackelbergSolution:
    """Selected pure action pair with both players' payoffs at that pair.

    ``feasible`` is true iff both cost constraints hold at the chosen pair.
    """

    leader_action: int
    follower_action: int
    leader_value: float
    follower_value: float
    feasible: bool


def follower_best_response(game: ConstrainedBimatrixGame, leader_action: int) -> int:
    """Best feasible follower column against a fixed leader row.

    Maximizes q2 over columns with g2 <= d2; lowest index wins ties. With an
    empty feasible set, falls back to the minimum-g2 column.
    """
    q2_row = game.q2[leader_action]
    g2_row = game.g2[leader_action]
    best = -1
    best_val = -math.inf
    for j in range(game.n2):
        if g2_row[j] <= game.d2 and q2_row[j] > best_val:
            best = j
            best_val = q2_row[j]
    if best >= 0:
        return best
    return int(np.argmin(g2_row))


def solve_arrays(q1, q2, g1, g2, d1: float, d2: float) -> tuple[int, int, bool]:
    """Low-level solve on bare matrices; returns (leader, follower, feasible).

    Shared by the dataclass wrapper below and by per-state hot loops that
    cannot afford constructing a validated game object each call.
    """
    n1, n2 = q1.shape
    replies = [0] * n1
    for i in range(n1):
        best = -1
        best_val = -math.inf
        for j in range(n2):
            if g2[i, j] <= d2 and q2[i, j] > best_val:
                best = j
                best_val = q2[i, j]
        if best < 0:
            best = int(np.argmin(g2[i]))
        replies[i] = best
    leader = -1
    leader_val = -math.inf
    for i in range(n1):
        if g1[i, replies[i]] <= d1 and q1[i, replies[i]] > leader_val:
            leader = i
            leader_val = q1[i, replies[i]]
    if leader < 0:
        fallback_cost = math.inf
        for i in range(n1):
            if g1[i, replies[i]] < fallback_cost:
                leader = i
                fallback_cost = g1[i, replies[i]]
    j = replies[leader]
    feasible = bool(g1[leader, j] <= d1 and g2[leader, j] <= d2)
    return leader, j, feasible


def solve_constrained_stackelberg(game: ConstrainedBimatrixGame) -> StackelbergSolution:
    """Enumerate all leader rows against follower best responses.

    The leader's constraint is evaluated at the follower's best response to
    each candidate row. Infeasibility at either level is absorbed by the
    minimum-cost fallback and surfaces only through the ``feasible`` flag.
    """
    i, j, feasible = solve_arrays(game.q1, game.q2, game.g1, game.g2, game.d1, game.d2)
    return StackelbergSolution(
        leader_action=i,
        follower_action=j,
        leader_value=float(game.q1[i, j]),
        follower_value=float(game.q2[i, j]),
        feasible=feasible,
    )


def verify_solution(game: ConstrainedBimatrixGame, sol: StackelbergSolution) -> bool:
    """Check a solution by literal enumeration, independent of the solver.

    True iff (a) no feasible follower column at ``sol.leader_action`` strictly
    improves q2 over the chosen column, which must itself be feasible, and
    (b) no leader row, paired with its own best feasible reply, is feasible
    and strictly improves q1 over the chosen pair.
    """
    li, fj = sol.leader_action, sol.follower_action
    if not (0 <= li < game.n1 and 0 <= fj < game.n2):
        raise IndexError("solution indices out of range")

    # Follower optimality at the solved leader row.
    if game.g2[li, fj] > game.d2:
        return False
    for j in range(game.n2):
        if game.g2[li, j] <= game.d2 and game.q2[li, j] > game.q2[li, fj]:
            return False

    # Leader optimality against best replies, re-derived from scratch here.
    if game.g1[li, fj] > game.d1:
        return False
    for i in range(game.n1):
        reply = -1
        reply_val = -math.inf
        for j in range(game.n2):
            if game.g2[i, j] <= game.d2 and game.q2[i, j] > reply_val:
                reply = j
                reply_val = game.q2[i, j]
        if reply < 0:
            reply = int(np.argmin(game.g2[i]))
        if game.g1[i, reply] <= game.d1 and game.q1[i, reply] > game.q1[li, fj]:
            return False
    return True


# --- text format for game files (header "n1 n2 d1 d2", then q1 q2 g1 g2 row-major) ---


def parse_game_text(text: str) -> ConstrainedBimatrixGame:
    """Parse the whitespace-separated game file format."""
    tokens = text.split()
    if len(tokens) < 4:
        raise ValueError("game text needs a 'n1 n2 d1 d2' header")
    n1, n2 = int(tokens[0]), int(tokens[1])
    d1, d2 = float(tokens[2]), float(tokens[3])
    need = 4 + 4 * n1 * n2
    if len(tokens) != need:
        raise ValueError(f"expected {need} tokens for a {n1}x{n2} game, got {len(tokens)}")
    values = np.array([float(t) for t in tokens[4:]], dtype=float)
    mats = values.reshape(4, n1, n2)
    return ConstrainedBimatrixGame(q1=mats[0], q2=mats[1], g1=mats[2], g2=mats[3], d1=d1, d2=d2)


def format_game_text(game: ConstrainedBimatrixGame) -> str:
    lines = [f"{game.n1} {game.n2} {game.d1} {game.d2}"]
    for mat in (game.q1, game.q2, game.g1, game.g2):
        for row in mat:
            lines.append(" ".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def load_game_file(path) -> ConstrainedBimatrixGame:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_game_text(fh.read())
