"""Training loop driver: rollout, replay, updates, periodic evaluation.

Fully reproducible from (config, seed): every random draw flows from
generators seeded by the config, evaluation uses its own derived seeds, and
the metrics file contains no timing columns.
"""

from __future__ import annotations

import math
import time
from pathlib import Path

import numpy as np

from ..agents import (
    CsMaddpgPair,
    CsqPair,
    LinearSchedule,
    ReplayBuffer,
    Transition,
    csq_select_actions,
    csq_update,
    maddpg_select_actions,
    maddpg_update_actors,
    maddpg_update_critics,
    update_lagrange,
)
from ..driving import DrivingEnv, load_scenario_config
from ..nn import NonFiniteParameter
from .config import RunConfig
from .evaluate import evaluate_pair
from .metrics import write_metrics
from .persistence import save_pair

__all__ = ["run_training"]


def _build_pair(cfg: RunConfig, env: DrivingEnv, rng):
    if cfg.algorithm == "csq":
        return CsqPair(
            env.state_dim, env.n_actions, env.n_actions,
            hidden=cfg.critic_hidden, d1=cfg.d1, d2=cfg.d2, gamma=cfg.gamma,
            learning_rate=cfg.critic_lr,
            epsilon_schedule=LinearSchedule(cfg.epsilon_start, cfg.epsilon_end, cfg.epsilon_steps),
            rng=rng,
        )
    return CsMaddpgPair(
        env.obs1_dim, env.obs2_dim, env.state_dim, *env.action_dims,
        actor_hidden=cfg.actor_hidden, critic_hidden=cfg.critic_hidden,
        d1=cfg.d1, d2=cfg.d2, gamma=cfg.gamma,
        actor_lr=cfg.actor_lr, critic_lr=cfg.critic_lr, lambda_lr=cfg.lambda_lr,
        a_low=cfg.a_low, a_high=cfg.a_high,
        noise_schedule=LinearSchedule(cfg.noise_start, cfg.noise_end, cfg.noise_steps),
        rng=rng,
    )


def run_training(cfg: RunConfig, verbose: bool = True):
    """Train per the config; returns (checkpoint_path, metrics_path)."""
    if cfg.algorithm not in ("csq", "cs-maddpg"):
        raise ValueError(f"run_training drives csq/cs-maddpg, not {cfg.algorithm!r}")
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    scenario_config = load_scenario_config(cfg.scenario_config) if cfg.scenario_config else None
    env = DrivingEnv(cfg.scenario, scenario_config)
    if cfg.horizon is not None:
        env.spec.horizon = cfg.horizon

    net_rng = np.random.default_rng(cfg.seed)
    act_rng = np.random.default_rng(cfg.seed + 1)
    sample_rng = np.random.default_rng(cfg.seed + 2)
    pair = _build_pair(cfg, env, net_rng)

    action_dims = None if env.discrete else env.action_dims
    buffer = ReplayBuffer(cfg.buffer_capacity, env.state_dim, env.obs1_dim, env.obs2_dim,
                          action_dims=action_dims)

    rows = []
    comments = []
    losses = (0.0, 0.0, 0.0, 0.0)
    started = time.perf_counter()

    def run_eval(step):
        row = evaluate_pair(pair, cfg.algorithm, cfg.scenario, cfg.eval_episodes,
                            seed=cfg.seed * 7_919 + step, gamma=cfg.gamma,
                            scenario_config=scenario_config, step=step)
        row.loss_q1, row.loss_q2, row.loss_g1, row.loss_g2 = losses
        row.wall_clock = time.perf_counter() - started
        rows.append(row)
        if verbose:
            print(f"[{cfg.run_name()}] step {step} return ({row.ret1:.1f}, {row.ret2:.1f}) "
                  f"collision_rate {row.collision_rate:.2f} "
                  f"lambda ({row.lambda1:.3f}, {row.lambda2:.3f}) "
                  f"wall {row.wall_clock:.1f}s", flush=True)

    metrics_path = out_dir / f"{cfg.run_name()}.metrics.csv"
    ckpt_path = out_dir / f"{cfg.run_name()}.ckpt"

    episode = 0
    obs1, obs2, state = env.reset(cfg.seed * 1_000_003 + episode)
    run_eval(0)
    try:
        for step in range(1, cfg.total_steps + 1):
            pair.set_step(step)
            if cfg.algorithm == "csq":
                a1, a2, _ = csq_select_actions(pair, state, True, act_rng)
            else:
                a1, a2 = maddpg_select_actions(pair, obs1, obs2, True, act_rng)
            out = env.step((a1, a2))
            buffer.push(Transition(
                state=state, obs1=obs1, obs2=obs2, a1=a1, a2=a2,
                r1=out.r1, r2=out.r2, c1=out.c1, c2=out.c2, done=out.done,
                next_state=out.global_state, next_obs1=out.obs1, next_obs2=out.obs2,
            ))
            if out.done:
                episode += 1
                obs1, obs2, state = env.reset(cfg.seed * 1_000_003 + episode)
            else:
                obs1, obs2, state = out.obs1, out.obs2, out.global_state

            ready = len(buffer) >= max(cfg.batch_size, cfg.learning_starts)
            if ready and step % cfg.update_every == 0:
                for _ in range(cfg.updates_per_step):
                    batch = buffer.sample(cfg.batch_size, sample_rng)
                    if cfg.algorithm == "csq":
                        losses = csq_update(pair, batch)
                    else:
                        losses = maddpg_update_critics(pair, batch)
                        maddpg_update_actors(pair, batch)
                        update_lagrange(pair, batch)
                    pair.blend_targets(cfg.rho)

            if step % cfg.eval_every == 0 or step == cfg.total_steps:
                run_eval(step)
    except NonFiniteParameter as err:
        comments.append(f"aborted step {len(rows)}: NonFiniteParameter: {err}")
        write_metrics(metrics_path, rows, comments)
        raise
    save_pair(ckpt_path, pair, algorithm=cfg.algorithm, scenario=cfg.scenario,
              step=cfg.total_steps)
    write_metrics(metrics_path, rows, comments)
    return ckpt_path, metrics_path
