"""Diagonal Gaussian policy head on top of the actor network."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..neural import MlpNetwork

LOG_SCALE_MIN = -10.0
LOG_SCALE_MAX = 3.0
_HALF_LOG_2PI = 0.5 * np.log(2 * np.pi)


@dataclass(frozen=True)
class PolicyOutput:
    means: np.ndarray
    log_scales: np.ndarray  # clamped
    raw_log_scales: np.ndarray

    @property
    def scales(self) -> np.ndarray:
        return np.exp(self.log_scales)

    @property
    def clamp_mask(self) -> np.ndarray:
        """True where the raw log-scale lies inside the clamp (gradient passes)."""
        return (self.raw_log_scales >= LOG_SCALE_MIN) & (self.raw_log_scales <= LOG_SCALE_MAX)


@dataclass(frozen=True)
class ActionVector:
    a: np.ndarray
    log_prob: np.ndarray


def split_output(raw: np.ndarray) -> PolicyOutput:
    """Actor outputs come in (mean, log-scale) pairs: even columns are means."""
    raw = np.asarray(raw)
    means = raw[..., 0::2]
    raw_ls = raw[..., 1::2]
    return PolicyOutput(means, np.clip(raw_ls, LOG_SCALE_MIN, LOG_SCALE_MAX), raw_ls)


def gaussian_log_prob(a, means, log_scales) -> np.ndarray:
    z = (a - means) * np.exp(-log_scales)
    return np.sum(-0.5 * z**2 - log_scales - _HALF_LOG_2PI, axis=-1)


def sample_action(actor: MlpNetwork, states: np.ndarray, rng: np.random.Generator,
                  mode: str = "stochastic") -> ActionVector:
    """Draw actions for a batch of states with the actor in inference mode.

    ``mode="mean"`` returns the distribution means (used for evaluation);
    ``log_prob`` is always the density of the returned action.
    """
    states = np.atleast_2d(states)
    out = split_output(actor.forward(states, training=False))
    if mode == "mean":
        a = out.means.copy()
    elif mode == "stochastic":
        a = out.means + out.scales * rng.standard_normal(out.means.shape)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return ActionVector(a, gaussian_log_prob(a, out.means, out.log_scales))
