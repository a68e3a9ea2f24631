from __future__ import annotations

import numpy as np

from ..errors import BufferUnderfull


class ExperienceBuffer:
    """Fixed-capacity FIFO ring of (state, action, reward) tuples."""

    def __init__(self, capacity: int, state_dim: int, action_dim: int):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.capacity = capacity
        self.states = np.zeros((capacity, state_dim))
        self.actions = np.zeros((capacity, action_dim))
        self.rewards = np.zeros(capacity)
        self.write_cursor = 0
        self.size = 0

    def __len__(self):
        return self.size

    def push(self, states, actions, rewards) -> None:
        """Append one tuple or a batch of tuples (leading axis)."""
        states = np.atleast_2d(states)
        actions = np.atleast_2d(actions)
        rewards = np.atleast_1d(rewards)
        for s, a, r in zip(states, actions, rewards):
            i = self.write_cursor
            self.states[i], self.actions[i], self.rewards[i] = s, a, r
            self.write_cursor = (i + 1) % self.capacity
            self.size = min(self.size + 1, self.capacity)

    def ordered(self):
        """Stored tuples from oldest to newest."""
        start = self.write_cursor if self.size == self.capacity else 0
        idx = (start + np.arange(self.size)) % self.capacity
        return self.states[idx], self.actions[idx], self.rewards[idx]

    def sample(self, batch_size: int, rng: np.random.Generator):
        """Uniformly drawn indices (with replacement) over the filled region."""
        if self.size < batch_size:
            raise BufferUnderfull(f"buffer holds {self.size} < batch size {batch_size}")
        idx = rng.integers(0, self.size, size=batch_size)
        return self.states[idx], self.actions[idx], self.rewards[idx]
