"""Transition records and a fixed-capacity ring replay buffer.

One buffer class serves both algorithms: discrete joint actions are stored
as integer pairs, continuous ones as float vectors, chosen at construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["Transition", "Batch", "ReplayBuffer"]


@dataclass
class Transition:
    """One environment step from both agents' point of view.

    Costs must be nonnegative and every numeric field finite; terminal steps
    carry copied next fields, which learners mask by (1 - done).
    """

    state: np.ndarray
    obs1: np.ndarray
    obs2: np.ndarray
    a1: object
    a2: object
    r1: float
    r2: float
    c1: float
    c2: float
    done: bool
    next_state: np.ndarray
    next_obs1: np.ndarray
    next_obs2: np.ndarray


@dataclass
class Batch:
    state: np.ndarray
    obs1: np.ndarray
    obs2: np.ndarray
    a1: np.ndarray
    a2: np.ndarray
    r1: np.ndarray
    r2: np.ndarray
    c1: np.ndarray
    c2: np.ndarray
    done: np.ndarray
    next_state: np.ndarray
    next_obs1: np.ndarray
    next_obs2: np.ndarray

    def __len__(self) -> int:
        return self.state.shape[0]


class ReplayBuffer:
    """Ring buffer over transitions with uniform random sampling.

    ``action_dims=None`` stores integer action indices (CSQ); a pair of
    dimensions stores float action vectors (CS-MADDPG).
    """

    def __init__(self, capacity: int, state_dim: int, obs1_dim: int, obs2_dim: int,
                 action_dims: tuple[int, int] | None = None):
        if capacity < 1:
            raise ValueError("capacity must be positive")
        self.capacity = capacity
        self._size = 0
        self._pos = 0
        self.state = np.zeros((capacity, state_dim))
        self.obs1 = np.zeros((capacity, obs1_dim))
        self.obs2 = np.zeros((capacity, obs2_dim))
        if action_dims is None:
            self.a1 = np.zeros(capacity, dtype=np.int64)
            self.a2 = np.zeros(capacity, dtype=np.int64)
        else:
            self.a1 = np.zeros((capacity, action_dims[0]))
            self.a2 = np.zeros((capacity, action_dims[1]))
        self.r1 = np.zeros(capacity)
        self.r2 = np.zeros(capacity)
        self.c1 = np.zeros(capacity)
        self.c2 = np.zeros(capacity)
        self.done = np.zeros(capacity)
        self.next_state = np.zeros((capacity, state_dim))
        self.next_obs1 = np.zeros((capacity, obs1_dim))
        self.next_obs2 = np.zeros((capacity, obs2_dim))

    def __len__(self) -> int:
        return self._size

    def push(self, t: Transition) -> None:
        if t.c1 < 0 or t.c2 < 0:
            raise ValueError("costs must be nonnegative")
        for v in (t.r1, t.r2, t.c1, t.c2):
            if not np.isfinite(v):
                raise ValueError("rewards and costs must be finite")
        i = self._pos
        self.state[i] = t.state
        self.obs1[i] = t.obs1
        self.obs2[i] = t.obs2
        self.a1[i] = t.a1
        self.a2[i] = t.a2
        self.r1[i] = t.r1
        self.r2[i] = t.r2
        self.c1[i] = t.c1
        self.c2[i] = t.c2
        self.done[i] = float(t.done)
        self.next_state[i] = t.next_state
        self.next_obs1[i] = t.next_obs1
        self.next_obs2[i] = t.next_obs2
        self._pos = (self._pos + 1) % self.capacity
        self._size = min(self._size + 1, self.capacity)

    def sample(self, batch_size: int, rng) -> Batch:
        if batch_size > self._size:
            raise ValueError(f"cannot sample {batch_size} from buffer of size {self._size}")
        idx = rng.integers(self._size, size=batch_size)
        return Batch(
            state=self.state[idx], obs1=self.obs1[idx], obs2=self.obs2[idx],
            a1=self.a1[idx], a2=self.a2[idx],
            r1=self.r1[idx], r2=self.r2[idx], c1=self.c1[idx], c2=self.c2[idx],
            done=self.done[idx],
            next_state=self.next_state[idx],
            next_obs1=self.next_obs1[idx], next_obs2=self.next_obs2[idx],
        )
