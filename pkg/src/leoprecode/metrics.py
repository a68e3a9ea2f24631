"""SINR, SLNR, sum rate and beam-gain patterns."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import steering_vector
from .config import ScenarioConfig


@dataclass(frozen=True)
class PrecodingMatrix:
    """Complex ``N x K`` precoder; column ``k`` serves user ``k``."""

    W: np.ndarray
    power_budget: float

    def __post_init__(self):
        if self.W.ndim != 2:
            raise ValueError(f"precoder must be 2-D, got shape {self.W.shape}")

    @property
    def total_power(self) -> float:
        return float(np.sum(np.abs(self.W) ** 2))

    def column_powers(self) -> np.ndarray:
        return np.sum(np.abs(self.W) ** 2, axis=0)

    def within_budget(self, rtol: float = 1e-9) -> bool:
        return self.total_power <= self.power_budget * (1 + rtol)


@dataclass(frozen=True)
class RateReport:
    per_user_sinr: np.ndarray
    per_user_rate: np.ndarray
    sum_rate: float


def _as_array(W) -> np.ndarray:
    return W.W if isinstance(W, PrecodingMatrix) else np.asarray(W)


def _gain_matrix(H: np.ndarray, W) -> np.ndarray:
    # G[..., k, l] = |h_k w_l|^2
    return np.abs(H @ _as_array(W)) ** 2


def sinr(H: np.ndarray, W, noise_power: float) -> np.ndarray:
    """Per-user SINR; leading batch dimensions of ``H`` and ``W`` broadcast."""
    G = _gain_matrix(H, W)
    signal = np.diagonal(G, axis1=-2, axis2=-1)
    interference = G.sum(axis=-1) - signal
    return signal / (noise_power + interference)


def slnr(H: np.ndarray, W, noise_power: float) -> np.ndarray:
    """Per-user SLNR: leakage of beam ``k`` onto every other user's channel."""
    G = _gain_matrix(H, W)
    signal = np.diagonal(G, axis1=-2, axis2=-1)
    leakage = G.sum(axis=-2) - signal
    return signal / (noise_power + leakage)


def sum_rate_values(H: np.ndarray, W, noise_power: float) -> np.ndarray:
    """Batched sum rate in bit/s/Hz, without building a report."""
    return np.log2(1 + sinr(H, W, noise_power)).sum(axis=-1)


def sum_rate(H: np.ndarray, W, noise_power: float) -> RateReport:
    gamma = sinr(H, W, noise_power)
    rates = np.log2(1 + gamma)
    return RateReport(gamma, rates, float(rates.sum()))


def beam_pattern(W, cfg: ScenarioConfig, aod_grid) -> np.ndarray:
    """Linear beam gain ``|a(cos e) w_k|`` of every user's beam over an AoD grid.

    Path loss and antenna gains are excluded. Returns shape ``(K, len(grid))``.
    """
    grid = np.atleast_1d(np.asarray(aod_grid, dtype=float))
    if grid.size == 0:
        raise ValueError("aod_grid must be nonempty")
    A = steering_vector(np.cos(grid), cfg)  # (G, N)
    return np.abs(A @ _as_array(W)).T


def half_power_beamwidth(gains: np.ndarray, grid: np.ndarray) -> float:
    """Width of the contiguous region around the peak where gain >= peak/sqrt(2).

    Edges are linearly interpolated between grid points. ``grid`` must be
    monotone; the result carries the grid's units.
    """
    gains = np.asarray(gains, dtype=float)
    grid = np.asarray(grid, dtype=float)
    peak = int(np.argmax(gains))
    level = gains[peak] / np.sqrt(2)

    def edge(step):
        i = peak
        while 0 <= i + step < len(gains) and gains[i + step] >= level:
            i += step
        j = i + step
        if not 0 <= j < len(gains):
            return grid[i]
        frac = (gains[i] - level) / (gains[i] - gains[j])
        return grid[i] + frac * (grid[j] - grid[i])

    return float(abs(edge(+1) - edge(-1)))
