import numpy as np
import pytest

from csmarl.agents import CsMaddpgPair, ReplayBuffer, Transition, chain_decisions, maddpg_select_actions
from csmarl.nn import init_mlp


def make_transition(rng, state_dim=3, obs_dim=2, c1=0.0):
    return Transition(
        state=rng.standard_normal(state_dim),
        obs1=rng.standard_normal(obs_dim), obs2=rng.standard_normal(obs_dim),
        a1=1, a2=0, r1=0.5, r2=-0.5, c1=c1, c2=0.0, done=False,
        next_state=rng.standard_normal(state_dim),
        next_obs1=rng.standard_normal(obs_dim), next_obs2=rng.standard_normal(obs_dim),
    )


class TestReplayBuffer:
    def test_ring_overwrites_oldest(self):
        rng = np.random.default_rng(0)
        buf = ReplayBuffer(4, 3, 2, 2)
        for i in range(6):
            t = make_transition(rng)
            t.r1 = float(i)
            buf.push(t)
        assert len(buf) == 4
        assert set(buf.r1.tolist()) == {2.0, 3.0, 4.0, 5.0}

    def test_negative_cost_rejected(self):
        buf = ReplayBuffer(4, 3, 2, 2)
        with pytest.raises(ValueError):
            buf.push(make_transition(np.random.default_rng(1), c1=-0.1))

    def test_sample_requires_enough_entries(self):
        buf = ReplayBuffer(8, 3, 2, 2)
        buf.push(make_transition(np.random.default_rng(2)))
        with pytest.raises(ValueError):
            buf.sample(2, np.random.default_rng(0))

    def test_sampling_deterministic_given_rng(self):
        rng = np.random.default_rng(3)
        buf = ReplayBuffer(16, 3, 2, 2)
        for _ in range(10):
            buf.push(make_transition(rng))
        b1 = buf.sample(4, np.random.default_rng(7))
        b2 = buf.sample(4, np.random.default_rng(7))
        np.testing.assert_array_equal(b1.state, b2.state)

    def test_continuous_action_storage(self):
        buf = ReplayBuffer(4, 3, 2, 2, action_dims=(2, 1))
        t = make_transition(np.random.default_rng(4))
        t.a1 = np.array([0.1, -0.2])
        t.a2 = np.array([0.3])
        buf.push(t)
        batch = buf.sample(1, np.random.default_rng(0))
        np.testing.assert_allclose(batch.a1[0], [0.1, -0.2])


class TestChainDecisions:
    def test_two_agent_vertical_reduces_to_pair_selection(self):
        pair = CsMaddpgPair(3, 3, 4, 1, 1, actor_hidden=(8,), critic_hidden=(8,),
                            rng=np.random.default_rng(5))
        obs1, obs2 = np.ones(3) * 0.2, np.ones(3) * -0.4
        chained = chain_decisions([pair.actor1, pair.actor2], [obs1, obs2], "vertical")
        direct = maddpg_select_actions(pair, obs1, obs2, False, np.random.default_rng(0))
        np.testing.assert_array_equal(chained[0], direct[0])
        np.testing.assert_array_equal(chained[1], direct[1])

    def test_three_agent_vertical_input_shapes(self):
        rng = np.random.default_rng(6)
        obs_dims = (3, 2, 4)
        act_dims = (2, 1, 2)
        actors = [
            init_mlp([obs_dims[0], 8, act_dims[0]], "tanh", rng=rng),
            init_mlp([obs_dims[1] + act_dims[0], 8, act_dims[1]], "tanh", rng=rng),
            init_mlp([obs_dims[2] + act_dims[0] + act_dims[1], 8, act_dims[2]], "tanh", rng=rng),
        ]
        assert actors[2].in_dim == obs_dims[2] + act_dims[0] + act_dims[1]
        obs = [rng.standard_normal(d) for d in obs_dims]
        actions = chain_decisions(actors, obs, "vertical")
        assert [a.shape[0] for a in actions] == list(act_dims)

    def test_horizontal_followers_see_all_leaders(self):
        rng = np.random.default_rng(7)
        actors = [
            init_mlp([2, 4, 1], "tanh", rng=rng),
            init_mlp([2, 4, 1], "tanh", rng=rng),
            init_mlp([2 + 2, 4, 1], "tanh", rng=rng),
            init_mlp([2 + 2, 4, 1], "tanh", rng=rng),
        ]
        obs = [rng.standard_normal(2) for _ in range(4)]
        actions = chain_decisions(actors, obs, "horizontal", n_leaders=2)
        assert len(actions) == 4

    def test_horizontal_leader_actions_ignore_followers(self):
        rng = np.random.default_rng(8)
        actors = [
            init_mlp([2, 4, 1], "tanh", rng=rng),
            init_mlp([2, 4, 1], "tanh", rng=rng),
            init_mlp([4, 4, 1], "tanh", rng=rng),
            init_mlp([4, 4, 1], "tanh", rng=rng),
        ]
        obs = [rng.standard_normal(2) for _ in range(4)]
        before = chain_decisions(actors, obs, "horizontal", n_leaders=2)
        for w in actors[2].weights + actors[3].weights:
            w += rng.standard_normal(w.shape)
        after = chain_decisions(actors, obs, "horizontal", n_leaders=2)
        assert before[0].tobytes() == after[0].tobytes()
        assert before[1].tobytes() == after[1].tobytes()

    def test_invalid_mode_rejected(self):
        with pytest.raises(ValueError):
            chain_decisions([], [], "diagonal")
