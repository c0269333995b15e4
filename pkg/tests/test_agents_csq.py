import copy
import math

import numpy as np
import pytest

from csmarl import nn
from csmarl.agents import Batch, CsqPair, LinearSchedule, csq_select_actions, csq_update

INF = math.inf


class TableCritic:
    """Stub critic decoding the one-hot pair and looking up a fixed table."""

    def __init__(self, table, state_dim):
        self.table = np.asarray(table, float)
        self.state_dim = state_dim
        self.n1, self.n2 = self.table.shape

    def forward_batch(self, enc):
        a1 = enc[:, self.state_dim:self.state_dim + self.n1].argmax(axis=1)
        a2 = enc[:, self.state_dim + self.n1:].argmax(axis=1)
        return self.table[a1, a2][:, None]


def make_pair(state_dim=2, n1=2, n2=2, seed=0, **kw):
    return CsqPair(state_dim, n1, n2, hidden=(8,), rng=np.random.default_rng(seed), **kw)


def with_tables(pair, q1, q2, g1, g2):
    pair.q1 = TableCritic(q1, pair.state_dim)
    pair.q2 = TableCritic(q2, pair.state_dim)
    pair.g1 = TableCritic(g1, pair.state_dim)
    pair.g2 = TableCritic(g2, pair.state_dim)
    return pair


def terminal_batch(pair, rng, size=8):
    sd = pair.state_dim
    return Batch(
        state=rng.standard_normal((size, sd)), obs1=np.zeros((size, 1)), obs2=np.zeros((size, 1)),
        a1=rng.integers(pair.n_actions1, size=size), a2=rng.integers(pair.n_actions2, size=size),
        r1=rng.standard_normal(size), r2=rng.standard_normal(size),
        c1=np.abs(rng.standard_normal(size)), c2=np.abs(rng.standard_normal(size)),
        done=np.ones(size),
        next_state=rng.standard_normal((size, sd)),
        next_obs1=np.zeros((size, 1)), next_obs2=np.zeros((size, 1)),
    )


class TestSelect:
    def test_constant_critics_tie_break(self):
        pair = make_pair()
        zeros = np.zeros((2, 2))
        with_tables(pair, zeros, zeros, zeros, zeros)
        pair.d1 = pair.d2 = 5.0
        a1, a2, feasible = csq_select_actions(pair, np.zeros(2), False, np.random.default_rng(0))
        assert (a1, a2) == (0, 0) and feasible

    def test_delegates_to_game_solver(self):
        # The constrained 2x2 game where the leader's safe choice pins the
        # follower: solution (0, 0) although the follower prefers column 1.
        pair = make_pair()
        with_tables(pair, [[4, 1], [3, 2]], [[2, 3], [1, 4]],
                    np.zeros((2, 2)), [[0, 6], [0, 0]])
        pair.d1 = pair.d2 = 5.0
        a1, a2, feasible = csq_select_actions(pair, np.zeros(2), False, np.random.default_rng(0))
        assert (a1, a2) == (0, 0) and feasible

    def test_full_epsilon_uniform_over_feasible_set(self):
        pair = make_pair()
        g2 = np.array([[0.0, 9.0], [0.0, 0.0]])  # pair (0, 1) infeasible
        with_tables(pair, np.ones((2, 2)), np.ones((2, 2)), np.zeros((2, 2)), g2)
        pair.d1 = pair.d2 = 5.0
        pair.epsilon = 1.0
        rng = np.random.default_rng(42)
        counts = np.zeros((2, 2))
        n = 10_000
        for _ in range(n):
            a1, a2, _ = csq_select_actions(pair, np.zeros(2), True, rng)
            counts[a1, a2] += 1
        assert counts[0, 1] == 0
        p = 1.0 / 3.0
        sigma = math.sqrt(n * p * (1 - p))
        for cell in ((0, 0), (1, 0), (1, 1)):
            assert abs(counts[cell] - n * p) < 3 * sigma

    def test_epsilon_zero_ignores_rng(self):
        pair = make_pair(seed=3)
        pair.epsilon = 0.0
        state = np.ones(2)
        r1 = csq_select_actions(pair, state, True, np.random.default_rng(1))
        r2 = csq_select_actions(pair, state, True, np.random.default_rng(2))
        assert r1 == r2

    def test_unconstrained_matches_plain_stackelberg(self):
        pair = make_pair(seed=4, d1=INF, d2=INF)
        state = np.array([0.3, -0.2])
        q1v, q2v, _, _ = (m[0] for m in pair.enumerate_values(state))
        replies = q2v.argmax(axis=1)
        leader = int(q1v[np.arange(2), replies].argmax())
        a1, a2, feasible = csq_select_actions(pair, state, False, np.random.default_rng(0))
        assert (a1, a2) == (leader, int(replies[leader])) and feasible


class TestUpdate:
    def test_terminal_batch_loss_is_mse_to_reward(self):
        pair = make_pair(seed=5)
        rng = np.random.default_rng(6)
        batch = terminal_batch(pair, rng)
        enc = pair.encode(batch.state, batch.a1, batch.a2)
        expected = float(np.mean((pair.q1.forward_batch(enc)[:, 0] - batch.r1) ** 2))
        losses = csq_update(pair, batch)
        assert losses[0] == pytest.approx(expected, rel=1e-12)

    def test_gamma_zero_equals_terminal_masking(self):
        rng = np.random.default_rng(7)
        pair_a = make_pair(seed=8, gamma=0.0)
        pair_b = make_pair(seed=8, gamma=0.99)
        batch = terminal_batch(pair_a, rng)
        nonterminal = copy.deepcopy(batch)
        nonterminal.done = np.zeros_like(batch.done)
        la = csq_update(pair_a, nonterminal)
        lb = csq_update(pair_b, batch)
        assert la == lb
        for wa, wb in zip(pair_a.q1.weights, pair_b.q1.weights):
            np.testing.assert_array_equal(wa, wb)

    def test_scalar_critic_descends_toward_reward(self):
        pair = CsqPair(1, 1, 1, hidden=(), gamma=0.9, rng=np.random.default_rng(9))
        for net in (pair.q1, pair.q2, pair.g1, pair.g2):
            net.weights[0][:] = 0.0
            net.biases[0][:] = 0.0
        pair.opt_q1 = nn.make_optimizer(pair.q1, "sgd", 0.1)
        batch = Batch(
            state=np.zeros((1, 1)), obs1=np.zeros((1, 1)), obs2=np.zeros((1, 1)),
            a1=np.zeros(1, dtype=int), a2=np.zeros(1, dtype=int),
            r1=np.ones(1), r2=np.zeros(1), c1=np.zeros(1), c2=np.zeros(1),
            done=np.ones(1),
            next_state=np.zeros((1, 1)), next_obs1=np.zeros((1, 1)), next_obs2=np.zeros((1, 1)),
        )
        losses = [csq_update(pair, batch)[0] for _ in range(10)]
        assert all(b < a for a, b in zip(losses, losses[1:]))
        enc = pair.encode(batch.state, batch.a1, batch.a2)
        assert abs(pair.q1.forward_batch(enc)[0, 0] - 1.0) < 0.2

    def test_target_networks_masked_out_when_terminal(self):
        rng = np.random.default_rng(10)
        pair = make_pair(seed=11)
        twin = copy.deepcopy(pair)
        for net in (twin.q1_target, twin.q2_target, twin.g1_target, twin.g2_target):
            for w in net.weights:
                w += rng.standard_normal(w.shape)
        batch = terminal_batch(pair, rng)
        assert csq_update(pair, batch) == csq_update(twin, batch)

    def test_nonterminal_targets_use_target_nets(self):
        rng = np.random.default_rng(12)
        pair = make_pair(seed=13)
        twin = copy.deepcopy(pair)
        for w in twin.q1_target.weights:
            w += 1.0
        batch = terminal_batch(pair, rng)
        batch.done = np.zeros_like(batch.done)
        assert csq_update(pair, batch)[0] != csq_update(twin, batch)[0]


class TestSchedule:
    def test_linear_decay_and_floor(self):
        s = LinearSchedule(1.0, 0.05, 100)
        assert s.value(0) == 1.0
        assert s.value(50) == pytest.approx(0.525)
        assert s.value(100) == pytest.approx(0.05)
        assert s.value(10_000) == pytest.approx(0.05)

    def test_increasing_schedule_rejected(self):
        with pytest.raises(ValueError):
            LinearSchedule(0.1, 0.5, 10)

    def test_pair_set_step(self):
        pair = make_pair(epsilon_schedule=LinearSchedule(1.0, 0.0, 10))
        pair.set_step(5)
        assert pair.epsilon == pytest.approx(0.5)
