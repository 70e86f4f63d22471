"""Replay buffer for contextualized transitions.

Each stored item is (s, a_RL, lambda, r, s', done, per-critic masks). The
buffer is a fixed-capacity ring with FIFO overwrite and uniform sampling
with replacement.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class Transition:
    obs: np.ndarray
    action: np.ndarray
    lam: float
    reward: float
    next_obs: np.ndarray
    done: bool
    masks: np.ndarray


class ReplayBuffer:
    def __init__(self, capacity: int, obs_dim: int, act_dim: int, n_masks: int):
        if capacity <= 0:
            raise ValueError("capacity must be positive")
        self.capacity = int(capacity)
        self.obs = np.zeros((capacity, obs_dim), dtype=np.float64)
        self.next_obs = np.zeros((capacity, obs_dim), dtype=np.float64)
        self.actions = np.zeros((capacity, act_dim), dtype=np.float64)
        self.lams = np.zeros(capacity, dtype=np.float64)
        self.rewards = np.zeros(capacity, dtype=np.float64)
        self.dones = np.zeros(capacity, dtype=np.float64)
        self.masks = np.zeros((capacity, n_masks), dtype=bool)
        self.cursor = 0
        self.size = 0

    def push(self, obs, action, lam, reward, next_obs, done, masks) -> None:
        i = self.cursor
        self.obs[i] = obs
        self.actions[i] = action
        self.lams[i] = lam
        self.rewards[i] = reward
        self.next_obs[i] = next_obs
        self.dones[i] = 1.0 if done else 0.0
        self.masks[i] = masks
        self.cursor = (i + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)

    def sample(self, batch_size: int, rng: np.random.Generator) -> dict:
        """Uniform sample with replacement; arrays are copies."""
        if self.size < batch_size:
            raise ValueError(f"buffer holds {self.size} < batch {batch_size}")
        idx = rng.integers(0, self.size, size=batch_size)
        return {
            "obs": self.obs[idx],
            "actions": self.actions[idx],
            "lams": self.lams[idx],
            "rewards": self.rewards[idx],
            "next_obs": self.next_obs[idx],
            "dones": self.dones[idx],
            "masks": self.masks[idx],
        }

    def __len__(self) -> int:
        return self.size
