"""Adam with a cosine-decay learning-rate schedule."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import NonFiniteGradient


@dataclass(frozen=True)
class CosineDecay:
    """``lr(t) = final + (base - final) * (1 + cos(pi * min(t, T) / T)) / 2``.

    ``final = final_fraction * base``. A horizon of 0 holds the base rate.
    """

    base_lr: float
    total_steps: int
    final_fraction: float = 0.01

    def __call__(self, step: int) -> float:
        if self.total_steps <= 0:
            return self.base_lr
        final = self.final_fraction * self.base_lr
        t = min(step, self.total_steps) / self.total_steps
        return final + (self.base_lr - final) * (1 + math.cos(math.pi * t)) / 2


class Adam:
    def __init__(self, size: int, schedule: CosineDecay, beta1: float = 0.9,
                 beta2: float = 0.999, eps: float = 1e-8):
        self.schedule = schedule
        self.beta1, self.beta2, self.eps = beta1, beta2, eps
        self.first_moment = np.zeros(size)
        self.second_moment = np.zeros(size)
        self.step_count = 0

    @property
    def lr(self) -> float:
        return self.schedule(self.step_count)

    def step(self, params: np.ndarray, grads: np.ndarray) -> np.ndarray:
        """Update ``params`` in place and return them.

        Raises :class:`NonFiniteGradient` before touching any state if a
        gradient entry is NaN or infinite.
        """
        if grads.shape != params.shape or grads.shape != self.first_moment.shape:
            raise ValueError("parameter, gradient and moment shapes differ")
        if not np.all(np.isfinite(grads)):
            bad = np.flatnonzero(~np.isfinite(grads))
            raise NonFiniteGradient(f"{bad.size} non-finite gradient entries, first at index {bad[0]}")
        lr = self.lr
        self.step_count += 1
        t = self.step_count
        self.first_moment *= self.beta1
        self.first_moment += (1 - self.beta1) * grads
        self.second_moment *= self.beta2
        self.second_moment += (1 - self.beta2) * grads**2
        m_hat = self.first_moment / (1 - self.beta1**t)
        v_hat = self.second_moment / (1 - self.beta2**t)
        params -= lr * m_hat / (np.sqrt(v_hat) + self.eps)
        return params

    def state(self) -> dict:
        return {
            "first_moment": self.first_moment.copy(),
            "second_moment": self.second_moment.copy(),
            "step_count": self.step_count,
        }

    def load_state(self, state: dict) -> None:
        self.first_moment[...] = state["first_moment"]
        self.second_moment[...] = state["second_moment"]
        self.step_count = int(state["step_count"])
