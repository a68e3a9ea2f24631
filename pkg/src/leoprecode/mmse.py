"""Non-robust MMSE precoder computed from the channel estimate."""

from __future__ import annotations

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from .errors import NormalizationOfZero, SingularSystem
from .metrics import PrecodingMatrix


def mmse_precoder(H_est: np.ndarray, transmit_power: float, noise_power: float) -> PrecodingMatrix:
    """Regularized channel inversion scaled to the full power budget.

    Solves ``(H^H H + noise * K / P * I) W' = H^H`` by Cholesky factorization
    and rescales so that ``||W||_F^2 = P``.
    """
    H_est = np.asarray(H_est, dtype=complex)
    K, N = H_est.shape
    Hh = H_est.conj().T
    gram = Hh @ H_est + noise_power * K / transmit_power * np.eye(N)
    try:
        W = cho_solve(cho_factor(gram, lower=True), Hh)
    except (LinAlgError, ValueError) as exc:
        raise SingularSystem(f"regularized Gram matrix not factorizable: {exc}") from exc
    power = np.real(np.trace(W.conj().T @ W))
    if not power > 0:
        raise NormalizationOfZero("MMSE precoder has zero power (zero channel estimate?)")
    return PrecodingMatrix(np.sqrt(transmit_power / power) * W, transmit_power)
