"""Conversions between complex channels/precoders and real network vectors."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..channel import sample_channel_batch
from ..config import ScenarioConfig
from ..errors import NotCalibrated, ZeroAction
from ..metrics import PrecodingMatrix

TRANSFORMS = ("magnitude-phase", "real-imag")
SCALE_FLOOR = 1e-12


def decompose(H: np.ndarray, transform: str = "magnitude-phase") -> np.ndarray:
    """Flatten the trailing ``(K, N)`` axes row-major into ``2KN`` interleaved reals.

    Each complex entry becomes a consecutive pair: ``(|z|, angle z)`` or
    ``(Re z, Im z)``.
    """
    H = np.asarray(H)
    flat = H.reshape(H.shape[:-2] + (-1,))
    if transform == "magnitude-phase":
        pair = (np.abs(flat), np.angle(flat))
    elif transform == "real-imag":
        pair = (flat.real, flat.imag)
    else:
        raise ValueError(f"unknown transform {transform!r}; choose from {TRANSFORMS}")
    return np.stack(pair, axis=-1).reshape(flat.shape[:-1] + (2 * flat.shape[-1],))


@dataclass
class StandardizationStats:
    """Static per-dimension shift and scale applied to decomposed channel estimates."""

    mean: np.ndarray | None = None
    scale: np.ndarray | None = None
    sample_count: int = 0
    transform: str = "magnitude-phase"

    @property
    def calibrated(self) -> bool:
        return self.mean is not None and self.scale is not None

    @classmethod
    def identity(cls, dim: int, transform: str = "magnitude-phase") -> "StandardizationStats":
        return cls(np.zeros(dim), np.ones(dim), 0, transform)

    @classmethod
    def from_samples(cls, x: np.ndarray, transform: str) -> "StandardizationStats":
        x = np.asarray(x, dtype=float)
        if x.shape[0] < 2:
            raise ValueError("need at least 2 samples to standardize")
        # constant dimensions take the sample itself as mean, so they map to exactly 0
        mean = np.where(np.ptp(x, axis=0) == 0, x[0], x.mean(axis=0))
        return cls(mean, np.maximum(x.std(axis=0), SCALE_FLOOR), x.shape[0], transform)


def calibrate_standardization(cfg: ScenarioConfig, rng: np.random.Generator, n_samples: int = 100,
                              transform: str = "magnitude-phase") -> StandardizationStats:
    """Estimate per-dimension mean and standard deviation from fresh channel estimates."""
    if n_samples < 2:
        raise ValueError("n_samples must be >= 2")
    _, estimated = sample_channel_batch(cfg, rng, n_samples)
    return StandardizationStats.from_samples(decompose(estimated, transform), transform)


def state_from_estimate(H_est: np.ndarray, stats: StandardizationStats) -> np.ndarray:
    """Standardized real state vector(s), shape ``(..., 2KN)``."""
    if not stats.calibrated:
        raise NotCalibrated("standardization statistics have not been calibrated")
    return (decompose(H_est, stats.transform) - stats.mean) / stats.scale


def actions_to_precoders(actions: np.ndarray, transmit_power: float, num_users: int,
                         num_antennas: int) -> np.ndarray:
    """Batched action -> precoder map. ``actions`` is ``(..., 2KN)``; returns ``(..., N, K)``.

    Consecutive reals pair into (real, imag) entries, reshaped row-major to
    ``N x K`` and scaled to Frobenius norm ``sqrt(P)``.
    """
    a = np.asarray(actions, dtype=float)
    if a.shape[-1] != 2 * num_users * num_antennas:
        raise ValueError(f"action length {a.shape[-1]} != 2*K*N = {2 * num_users * num_antennas}")
    norm = np.linalg.norm(a, axis=-1, keepdims=True)
    if np.any(norm == 0):
        raise ZeroAction("cannot normalize an all-zero action")
    z = a[..., 0::2] + 1j * a[..., 1::2]
    z = z.reshape(a.shape[:-1] + (num_antennas, num_users))
    return z * (np.sqrt(transmit_power) / norm[..., None])


def precoder_from_action(action: np.ndarray, transmit_power: float, num_users: int,
                         num_antennas: int) -> PrecodingMatrix:
    W = actions_to_precoders(np.ravel(action), transmit_power, num_users, num_antennas)
    return PrecodingMatrix(W, transmit_power)
