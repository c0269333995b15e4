import math

import numpy as np
import pytest

from csmarl.matgame import (
    ConstrainedBimatrixGame,
    StackelbergSolution,
    follower_best_response,
    format_game_text,
    parse_game_text,
    solve_constrained_stackelberg,
    verify_solution,
)

INF = math.inf


def make_game(q1, q2, g1, g2, d1=INF, d2=INF):
    return ConstrainedBimatrixGame(
        q1=np.asarray(q1, float), q2=np.asarray(q2, float),
        g1=np.asarray(g1, float), g2=np.asarray(g2, float), d1=d1, d2=d2,
    )


def random_game(rng, max_dim=6, thresholds=(0.0, 2.5, INF)):
    n1 = int(rng.integers(1, max_dim + 1))
    n2 = int(rng.integers(1, max_dim + 1))
    return make_game(
        rng.uniform(-5, 5, (n1, n2)), rng.uniform(-5, 5, (n1, n2)),
        rng.uniform(-5, 5, (n1, n2)), rng.uniform(-5, 5, (n1, n2)),
        d1=float(rng.choice(thresholds)), d2=float(rng.choice(thresholds)),
    )


class TestFollowerBestResponse:
    def test_constraint_excludes_better_payoff(self):
        game = make_game([[0, 0]], [[2, 3]], [[0, 0]], [[0, 6]], d2=5.0)
        assert follower_best_response(game, 0) == 0

    def test_unconstrained_argmax(self):
        game = make_game([[0, 0]], [[2, 3]], [[0, 0]], [[0, 6]], d2=INF)
        assert follower_best_response(game, 0) == 1

    def test_empty_feasible_set_falls_back_to_min_cost(self):
        game = make_game([[0, 0]], [[2, 3]], [[0, 0]], [[7, 9]], d2=5.0)
        assert follower_best_response(game, 0) == 0

    def test_tie_breaks_to_lowest_index(self):
        game = make_game([[0, 0, 0]], [[4, 4, 4]], [[0, 0, 0]], [[0, 0, 0]], d2=1.0)
        assert follower_best_response(game, 0) == 0


class TestSolve:
    def test_leader_steers_follower_via_constraint(self):
        # Brute-force over the 4 joint actions: leader 0 makes the follower's
        # preferred column 1 infeasible, so (0, 0) wins with values (4, 2).
        game = make_game(
            [[4, 1], [3, 2]], [[2, 3], [1, 4]],
            [[0, 0], [0, 0]], [[0, 6], [0, 0]], d1=5.0, d2=5.0,
        )
        sol = solve_constrained_stackelberg(game)
        assert (sol.leader_action, sol.follower_action) == (0, 0)
        assert sol.leader_value == 4.0 and sol.follower_value == 2.0
        assert sol.feasible

    def test_symmetric_diagonal_lowest_index(self):
        game = make_game([[1, 0], [0, 1]], [[1, 0], [0, 1]],
                         np.zeros((2, 2)), np.zeros((2, 2)))
        sol = solve_constrained_stackelberg(game)
        assert (sol.leader_action, sol.follower_action) == (0, 0)
        assert sol.leader_value == 1.0 and sol.follower_value == 1.0
        assert sol.feasible

    def test_singleton_infeasible_flagged(self):
        game = make_game([[7]], [[7]], [[9]], [[0]], d1=5.0)
        sol = solve_constrained_stackelberg(game)
        assert (sol.leader_action, sol.follower_action) == (0, 0)
        assert sol.leader_value == 7.0 and sol.follower_value == 7.0
        assert not sol.feasible


class TestVerify:
    def _derived_game(self):
        return make_game(
            [[4, 1], [3, 2]], [[2, 3], [1, 4]],
            [[0, 0], [0, 0]], [[0, 6], [0, 0]], d1=5.0, d2=5.0,
        )

    def test_accepts_solved_game(self):
        game = self._derived_game()
        assert verify_solution(game, solve_constrained_stackelberg(game))

    def test_rejects_leader_deviation(self):
        game = self._derived_game()
        bad = StackelbergSolution(1, 1, 2.0, 4.0, True)
        assert not verify_solution(game, bad)

    def test_singleton_feasible_pair(self):
        game = make_game([[7]], [[7]], [[1]], [[1]], d1=5.0, d2=5.0)
        assert verify_solution(game, solve_constrained_stackelberg(game))

    def test_index_out_of_range_raises(self):
        game = make_game([[1]], [[1]], [[0]], [[0]])
        with pytest.raises(IndexError):
            verify_solution(game, StackelbergSolution(2, 0, 0.0, 0.0, True))


class TestProperties:
    def test_oracle_equivalence_on_random_games(self):
        rng = np.random.default_rng(7)
        checked = 0
        for _ in range(400):
            game = random_game(rng)
            sol = solve_constrained_stackelberg(game)
            if sol.feasible:
                checked += 1
                assert verify_solution(game, sol)
        assert checked > 100  # feasible cases actually exercised

    def test_leader_threshold_relaxation_never_hurts(self):
        # Raising d1 with d2 fixed enlarges the leader's candidate set while
        # keeping every best response unchanged.
        rng = np.random.default_rng(8)
        for _ in range(300):
            game = random_game(rng, thresholds=(0.0, 2.5))
            relaxed = ConstrainedBimatrixGame(
                q1=game.q1, q2=game.q2, g1=game.g1, g2=game.g2,
                d1=game.d1 + float(rng.uniform(0.5, 4.0)), d2=game.d2,
            )
            a = solve_constrained_stackelberg(game)
            b = solve_constrained_stackelberg(relaxed)
            if a.feasible and b.feasible:
                assert b.leader_value >= a.leader_value - 1e-12

    def test_unconstrained_reduction_matches_plain_stackelberg(self):
        rng = np.random.default_rng(9)
        for _ in range(200):
            game = random_game(rng, thresholds=(INF,))
            sol = solve_constrained_stackelberg(game)
            # Plain enumeration, written independently of the solver.
            replies = np.argmax(game.q2, axis=1)
            leader = int(np.argmax(game.q1[np.arange(game.n1), replies]))
            assert (sol.leader_action, sol.follower_action) == (leader, int(replies[leader]))
            assert sol.feasible

    def test_payoff_shift_leaves_selection_unchanged(self):
        rng = np.random.default_rng(10)
        for _ in range(200):
            game = random_game(rng)
            sol = solve_constrained_stackelberg(game)
            shifted = ConstrainedBimatrixGame(
                q1=game.q1 + 3.7, q2=game.q2, g1=game.g1, g2=game.g2, d1=game.d1, d2=game.d2,
            )
            sol1 = solve_constrained_stackelberg(shifted)
            assert (sol.leader_action, sol.follower_action) == (
                sol1.leader_action, sol1.follower_action)
            shifted2 = ConstrainedBimatrixGame(
                q1=game.q1, q2=game.q2 - 1.3, g1=game.g1, g2=game.g2, d1=game.d1, d2=game.d2,
            )
            sol2 = solve_constrained_stackelberg(shifted2)
            assert (sol.leader_action, sol.follower_action) == (
                sol2.leader_action, sol2.follower_action)


class TestGameText:
    def test_round_trip(self):
        rng = np.random.default_rng(11)
        game = random_game(rng)
        parsed = parse_game_text(format_game_text(game))
        assert parsed.d1 == game.d1 and parsed.d2 == game.d2
        np.testing.assert_array_equal(parsed.q1, game.q1)
        np.testing.assert_array_equal(parsed.g2, game.g2)

    def test_parse_inf_thresholds(self):
        game = parse_game_text("1 1 inf 5.0\n1.0\n2.0\n3.0\n4.0\n")
        assert game.d1 == INF and game.d2 == 5.0
        assert game.q1[0, 0] == 1.0 and game.g2[0, 0] == 4.0

    def test_token_count_validated(self):
        with pytest.raises(ValueError):
            parse_game_text("2 2 inf inf 1.0 2.0")

    def test_invalid_shape_rejected(self):
        with pytest.raises(ValueError):
            make_game([[1, 2]], [[1]], [[0, 0]], [[0, 0]])
