"""User geometry, line-of-sight channels and erroneous channel estimates.

Angles are carried as space angles ``cos(aod)`` everywhere; the array axis
runs along the ground, so a user at ground offset ``x`` from the
sub-satellite point sees ``cos(aod) = x / d``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import ScenarioConfig


@dataclass(frozen=True)
class UserState:
    ground_offset: float
    distance: float
    aod: float
    space_angle: float
    path_loss: float
    fading_db: float
    phase: float


@dataclass(frozen=True)
class ChannelRealization:
    true_channel: np.ndarray  # (K, N)
    estimated_channel: np.ndarray  # (K, N)
    users: tuple
    angle_errors: np.ndarray  # (K,)

    @property
    def estimated_space_angles(self) -> np.ndarray:
        return np.array([u.space_angle for u in self.users]) + self.angle_errors

    @property
    def path_losses(self) -> np.ndarray:
        return np.array([u.path_loss for u in self.users])


def mean_positions(cfg: ScenarioConfig) -> np.ndarray:
    """Mean ground offsets, equally spaced and centered on the sub-satellite point."""
    k = np.arange(1, cfg.num_users + 1)
    return (k - (cfg.num_users + 1) / 2) * cfg.mean_user_distance


def free_space_path_loss(distance, cfg: ScenarioConfig):
    """Linear free-space path loss including both antenna gains."""
    distance = np.asarray(distance, dtype=float)
    return 16 * np.pi**2 * distance**2 / (cfg.wavelength**2 * cfg.user_gain * cfg.sat_gain)


def steering_vector(space_angle, cfg: ScenarioConfig) -> np.ndarray:
    """ULA steering vector(s) for one or many space angles.

    Returns shape ``(N,)`` for a scalar angle, otherwise ``angle.shape + (N,)``.
    Any real angle is accepted, including values outside [-1, 1].
    """
    n = np.arange(1, cfg.num_antennas + 1)
    order = cfg.num_antennas + 1 - 2 * n
    phi = np.asarray(space_angle, dtype=float)
    return np.exp(-1j * np.pi * (cfg.antenna_spacing / cfg.wavelength) * phi[..., None] * order)


def _geometry_draws(cfg: ScenarioConfig, rng: np.random.Generator, count: int):
    # draw order is part of the reproducibility contract: jitter, fading, phase
    shape = (count, cfg.num_users)
    jitter = rng.uniform(-0.5, 0.5, size=shape) * cfg.mean_user_distance
    fading_db = rng.standard_normal(size=shape) * cfg.fading_std
    uniform_phase = rng.uniform(0.0, 2 * np.pi, size=shape) if cfg.phase_mode == "uniform" else None
    if not cfg.jitter:
        jitter = np.zeros(shape)
    offsets = mean_positions(cfg)[None, :] + jitter
    distance = np.sqrt(cfg.altitude**2 + offsets**2)
    space_angle = offsets / distance
    path_loss = free_space_path_loss(distance, cfg) * 10 ** (fading_db / 10)
    if uniform_phase is None:
        phase = np.mod(2 * np.pi * distance / cfg.wavelength, 2 * np.pi)
    else:
        phase = uniform_phase
    return offsets, distance, space_angle, path_loss, fading_db, phase


def _channels(space_angle, path_loss, phase, cfg: ScenarioConfig) -> np.ndarray:
    amp = np.exp(-1j * phase) / np.sqrt(path_loss)
    return amp[..., None] * steering_vector(space_angle, cfg)


def sample_user_positions(cfg: ScenarioConfig, rng: np.random.Generator) -> list[UserState]:
    offsets, distance, space_angle, path_loss, fading_db, phase = _geometry_draws(cfg, rng, 1)
    return [
        UserState(
            ground_offset=float(offsets[0, k]),
            distance=float(distance[0, k]),
            aod=float(np.arccos(space_angle[0, k])),
            space_angle=float(space_angle[0, k]),
            path_loss=float(path_loss[0, k]),
            fading_db=float(fading_db[0, k]),
            phase=float(phase[0, k]),
        )
        for k in range(cfg.num_users)
    ]


def channel_vector(user: UserState, cfg: ScenarioConfig) -> np.ndarray:
    return _channels(np.float64(user.space_angle), np.float64(user.path_loss),
                     np.float64(user.phase), cfg)


def apply_aod_error(h: np.ndarray, angle_error, cfg: ScenarioConfig) -> np.ndarray:
    """Perturb channel row(s) by an additive space-angle error.

    ``angle_error`` has the shape of ``h`` without its last (antenna) axis.
    """
    return h * steering_vector(angle_error, cfg)


def _draw_errors(cfg: ScenarioConfig, rng: np.random.Generator, count: int) -> np.ndarray:
    # scaled unit draws keep streams aligned across error bounds
    return rng.uniform(-1.0, 1.0, size=(count, cfg.num_users)) * cfg.error_bound


def sample_realization(cfg: ScenarioConfig, rng: np.random.Generator) -> ChannelRealization:
    users = sample_user_positions(cfg, rng)
    true = np.stack([channel_vector(u, cfg) for u in users])
    errors = _draw_errors(cfg, rng, 1)[0]
    estimated = apply_aod_error(true, errors, cfg)
    return ChannelRealization(true, estimated, tuple(users), errors)


def sample_channel_batch(cfg: ScenarioConfig, rng: np.random.Generator, count: int):
    """Vectorized draw of ``count`` realizations.

    Returns ``(true, estimated)`` with shape ``(count, K, N)`` each. With
    ``count=1`` this consumes the random stream exactly like
    :func:`sample_realization`.
    """
    _, _, space_angle, path_loss, _, phase = _geometry_draws(cfg, rng, count)
    true = _channels(space_angle, path_loss, phase, cfg)
    errors = _draw_errors(cfg, rng, count)
    return true, apply_aod_error(true, errors, cfg)
