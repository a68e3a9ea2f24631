"""Robust SLNR precoder built from second-order statistics of the angle error.

Each user's beam is the dominant eigenvector of the whitened steering
autocorrelation, with the uniform-error characteristic function folded into
the autocorrelation entries.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from .config import ScenarioConfig
from .errors import EigenFailure, SingularSystem
from .metrics import PrecodingMatrix

POWER_ITER_TOL = 1e-10
POWER_ITER_BUDGET = 10_000
SQUARING_INTERVAL = 32


@dataclass(frozen=True)
class SteeringAutocorrelation:
    R: np.ndarray  # (N, N), Hermitian PSD, unit diagonal
    inverse_path_loss: float


def characteristic_uniform(t, error_bound: float):
    """Characteristic function of U(-B, B): ``sin(tB) / (tB)``, 1 at zero."""
    # np.sinc is the normalized sinc, sin(pi x) / (pi x)
    return np.sinc(np.asarray(t, dtype=float) * error_bound / np.pi)


def steering_autocorrelation(space_angle_est: float, error_bound: float, cfg: ScenarioConfig,
                             path_loss: float = 1.0) -> SteeringAutocorrelation:
    n = np.arange(cfg.num_antennas)
    lag = n[:, None] - n[None, :]
    t = 2 * np.pi / cfg.wavelength * cfg.antenna_spacing * lag
    R = np.exp(-1j * t * space_angle_est) * characteristic_uniform(t, error_bound)
    return SteeringAutocorrelation(R, 1.0 / path_loss)


def _fix_phase(v: np.ndarray) -> np.ndarray:
    i = int(np.argmax(np.abs(v)))
    return v * (np.abs(v[i]) / v[i])


def dominant_eigenpair(M: np.ndarray, tol: float = POWER_ITER_TOL,
                       max_iter: int = POWER_ITER_BUDGET) -> tuple[float, np.ndarray]:
    """Largest eigenvalue and unit eigenvector of ``M`` by power iteration.

    ``M`` must have a real, nonnegative, simple dominant eigenvalue (true for
    products of a Hermitian positive definite inverse with a Hermitian PSD
    matrix). Convergence is declared when successive phase-aligned iterates
    differ by less than ``tol`` in Euclidean norm.

    If the iterate has not settled after ``SQUARING_INTERVAL`` steps, the
    iterated matrix is squared (same eigenvectors, squared eigenvalue ratio).
    Nearly degenerate top eigenvalues are common for wide error bounds, where
    plain iteration would need millions of steps.
    """
    M = np.asarray(M, dtype=complex)
    # start from the column with the largest response; never orthogonal to
    # the dominant direction unless M is zero
    col = int(np.argmax(np.linalg.norm(M, axis=0)))
    v = M[:, col].copy()
    norm = np.linalg.norm(v)
    if norm == 0:
        raise EigenFailure("matrix is zero")
    v = v / norm
    Mp = M / np.linalg.norm(M)
    for step in range(1, max_iter + 1):
        u = Mp @ v
        norm = np.linalg.norm(u)
        if not np.isfinite(norm) or norm == 0:
            raise EigenFailure("power iteration produced a degenerate iterate")
        u = u / norm
        overlap = np.vdot(u, v)
        # compare directions, ignoring the arbitrary global phase
        aligned = u * (overlap / abs(overlap)) if overlap != 0 else u
        converged = np.linalg.norm(aligned - v) < tol
        v = aligned
        if converged:
            break
        if step % SQUARING_INTERVAL == 0:
            Mp = Mp @ Mp
            Mp /= np.linalg.norm(Mp)
    else:
        raise EigenFailure(f"power iteration did not converge in {max_iter} iterations")
    v = _fix_phase(v)
    eigenvalue = np.vdot(v, M @ v)
    if abs(eigenvalue.imag) > 1e-8 * max(abs(eigenvalue), 1e-300):
        raise EigenFailure(f"dominant eigenvalue not real: {eigenvalue}")
    return float(eigenvalue.real), v


def dense_dominant_eigenvector(signal: np.ndarray, interference: np.ndarray) -> np.ndarray:
    """Dominant generalized eigenvector of ``signal x = lam * interference x``."""
    _, vecs = scipy.linalg.eigh(signal, interference)
    v = vecs[:, -1]
    return _fix_phase(v / np.linalg.norm(v))


def rslnr_matrices(estimates: Sequence[tuple[float, float]], error_bound: float,
                   cfg: ScenarioConfig):
    """Per-user weighted autocorrelations ``sigma_v^2 R_v`` and the regularizer."""
    weighted = []
    for space_angle, path_loss in estimates:
        ac = steering_autocorrelation(space_angle, error_bound, cfg, path_loss)
        weighted.append(ac.inverse_path_loss * ac.R)
    K = len(weighted)
    reg = cfg.noise_power * K / cfg.transmit_power * np.eye(cfg.num_antennas)
    return weighted, reg


def rslnr_precoder(estimates: Sequence[tuple[float, float]], error_bound: float,
                   cfg: ScenarioConfig, method: str = "power") -> PrecodingMatrix:
    """Robust SLNR precoder with equal per-user power ``P / K``.

    Parameters
    ----------
    estimates
        ``(estimated space angle, path loss)`` for each user.
    error_bound
        Half-width of the uniform space-angle error assumed by the design.
    method
        ``"power"`` (power iteration on the whitened matrix) or ``"dense"``
        (generalized Hermitian eigendecomposition).
    """
    if len(estimates) < 1:
        raise ValueError("need at least one user")
    if any(L <= 0 for _, L in estimates):
        raise ValueError("path losses must be positive")
    weighted, reg = rslnr_matrices(estimates, error_bound, cfg)
    K = len(weighted)
    total = sum(weighted)
    W = np.empty((cfg.num_antennas, K), dtype=complex)
    for k in range(K):
        interference = total - weighted[k] + reg
        if method == "dense":
            psi = dense_dominant_eigenvector(weighted[k], interference)
        elif method == "power":
            try:
                factor = cho_factor(interference, lower=True)
            except LinAlgError as exc:
                raise SingularSystem(str(exc)) from exc
            _, psi = dominant_eigenpair(cho_solve(factor, weighted[k]))
        else:
            raise ValueError(f"unknown method {method!r}")
        W[:, k] = np.sqrt(cfg.transmit_power / K) * psi / np.linalg.norm(psi)
    return PrecodingMatrix(W, cfg.transmit_power)


def rslnr_from_realization(realization, error_bound: float, cfg: ScenarioConfig,
                           method: str = "power") -> PrecodingMatrix:
    """Robust SLNR precoder using a realization's estimated angles and path losses."""
    estimates = list(zip(realization.estimated_space_angles, realization.path_losses))
    return rslnr_precoder(estimates, error_bound, cfg, method)
