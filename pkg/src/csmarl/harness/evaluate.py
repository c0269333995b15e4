"""Deterministic policy evaluation: greedy rollouts, aggregated event rates."""

from __future__ import annotations

import numpy as np

from ..agents import csq_select_actions, maddpg_select_actions
from ..driving import DrivingEnv, ReplayRecorder
from .metrics import MetricsRow
from .persistence import load_pair

__all__ = ["evaluate_pair", "evaluate"]


def _greedy_actions(algorithm, pair, obs1, obs2, state):
    if algorithm == "csq":
        a1, a2, _ = csq_select_actions(pair, state, False, None)
        return a1, a2
    return maddpg_select_actions(pair, obs1, obs2, False, None)


def evaluate_pair(pair, algorithm: str, scenario: str, episodes: int, seed: int,
                  gamma: float | None = None, scenario_config: dict | None = None,
                  step: int = 0, replay_path=None) -> MetricsRow:
    """Run noise-free episodes; aggregates means and event frequencies.

    Pure: the pair is only read. Episode seeds derive from ``seed`` so two
    evaluations with identical inputs produce identical rows.
    """
    if episodes < 1:
        raise ValueError("evaluation needs at least one episode")
    if gamma is None:
        gamma = pair.gamma
    env = DrivingEnv(scenario, scenario_config)
    rets = np.zeros((episodes, 2))
    disc = np.zeros((episodes, 2))
    costs = np.zeros((episodes, 2))
    collided = np.zeros(episodes)
    leader_first = np.zeros(episodes)
    follower_first = np.zeros(episodes)
    no_finish = np.zeros(episodes)
    for ep in range(episodes):
        obs1, obs2, state = env.reset(seed * 1_000_003 + ep)
        recorder = ReplayRecorder() if (replay_path is not None and ep == 0) else None
        done = False
        t = 0
        while not done:
            actions = _greedy_actions(algorithm, pair, obs1, obs2, state)
            out = env.step(actions)
            rets[ep] += (out.r1, out.r2)
            disc[ep] += (gamma ** t * out.r1, gamma ** t * out.r2)
            costs[ep] += (out.c1, out.c2)
            if out.collision1 or out.collision2:
                collided[ep] = 1.0
            if recorder is not None:
                recorder.record(t, env.state, actions, out)
            obs1, obs2, state = out.obs1, out.obs2, out.global_state
            done = out.done
            t += 1
        ranks = env.state.arrival_rank
        leader_first[ep] = float(ranks[0] == 0)
        follower_first[ep] = float(ranks[1] == 0)
        no_finish[ep] = float(ranks[0] is None and ranks[1] is None)
        if recorder is not None:
            recorder.write(replay_path)
    return MetricsRow(
        step=step,
        ret1=float(rets[:, 0].mean()), ret2=float(rets[:, 1].mean()),
        disc_ret1=float(disc[:, 0].mean()), disc_ret2=float(disc[:, 1].mean()),
        cost1=float(costs[:, 0].mean()), cost2=float(costs[:, 1].mean()),
        collision_rate=float(collided.mean()),
        leader_first_rate=float(leader_first.mean()),
        follower_first_rate=float(follower_first.mean()),
        no_finish_rate=float(no_finish.mean()),
        lambda1=float(getattr(pair, "lagrange1", 0.0)),
        lambda2=float(getattr(pair, "lagrange2", 0.0)),
    )


def evaluate(checkpoint_path, episodes: int, seed: int = 0, scenario: str | None = None,
             replay_path=None) -> MetricsRow:
    """Evaluate a checkpoint file; never mutates it."""
    pair, extras = load_pair(checkpoint_path)
    return evaluate_pair(
        pair, extras["algorithm"], scenario or extras["scenario"], episodes, seed,
        step=int(extras.get("step", 0)), replay_path=replay_path,
    )
