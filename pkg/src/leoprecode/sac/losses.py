"""Critic regression loss, actor loss and entropy-temperature update.

Both losses fill the networks' ``grads`` vectors as a side effect when
``compute_grad`` is set, ready for an optimizer step.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..neural import MlpNetwork
from .policy import gaussian_log_prob, split_output


def critic_loss(critic: MlpNetwork, states, actions, rewards, l2_scale: float,
                compute_grad: bool = True) -> float:
    """Mean squared sum-rate error plus ``l2_scale * ||theta||^2`` (training-mode forward)."""
    x = np.concatenate([states, actions], axis=1)
    q = critic.forward(x, training=True)[:, 0]
    err = q - rewards
    loss = float(np.mean(err**2) + l2_scale * critic.l2_norm_sq())
    if compute_grad:
        critic.backward((2.0 * err / len(err))[:, None])
        critic.grads += 2.0 * l2_scale * critic.l2_mask * critic.params
    return loss


def critic_losses(critics: Sequence[MlpNetwork], batch, l2_scale: float,
                  compute_grad: bool = True) -> list[float]:
    states, actions, rewards = batch
    return [critic_loss(c, states, actions, rewards, l2_scale, compute_grad) for c in critics]


def actor_loss(actor: MlpNetwork, critics: Sequence[MlpNetwork], states, log_alpha: float,
               l2_scale: float, *, noise: np.ndarray | None = None,
               rng: np.random.Generator | None = None, compute_grad: bool = True):
    """Actor loss with reparameterized actions.

    ``-mean(min_c Q_c(s, a)) + exp(log_alpha) * mean(log pi(a|s)) + l2_scale * ||theta||``
    with ``a = mean + scale * noise``. The actor runs in training mode, the
    critics in inference mode. Note the unsquared parameter norm.

    Returns ``(loss, info)`` where ``info`` holds the per-sample log
    probabilities, the chosen critic per sample and the min-Q values.
    """
    if not critics:
        raise ValueError("need at least one critic")
    B = states.shape[0]
    raw = actor.forward(states, training=True)
    out = split_output(raw)
    if noise is None:
        noise = rng.standard_normal(out.means.shape)
    scales = out.scales
    actions = out.means + scales * noise
    log_prob = gaussian_log_prob(actions, out.means, out.log_scales)
    x = np.concatenate([states, actions], axis=1)
    q = np.stack([c.forward(x, training=False)[:, 0] for c in critics])
    choice = np.argmin(q, axis=0)
    q_min = q[choice, np.arange(B)]
    alpha = np.exp(log_alpha)
    theta_norm = np.sqrt(actor.l2_norm_sq())
    loss = float(-q_min.mean() + alpha * log_prob.mean() + l2_scale * theta_norm)

    if compute_grad:
        d_actions = np.zeros_like(actions)
        for c, critic in enumerate(critics):
            upstream = np.where(choice == c, -1.0 / B, 0.0)[:, None]
            d_actions += critic.backward(upstream)[:, states.shape[1]:]
        # log pi = sum(-noise^2/2 - log_scale - const) under reparameterization
        d_log_scales = d_actions * scales * noise - alpha / B
        d_log_scales = d_log_scales * out.clamp_mask
        d_raw = np.empty_like(raw)
        d_raw[:, 0::2] = d_actions
        d_raw[:, 1::2] = d_log_scales
        actor.backward(d_raw)
        if theta_norm > 0:
            actor.grads += l2_scale * actor.l2_mask * actor.params / theta_norm
    return loss, {"log_prob": log_prob, "critic_choice": choice, "q_min": q_min}


def temperature_gradient(log_alpha: float, mean_log_prob: float, target_entropy: float) -> float:
    """d/d(log_alpha) of ``-exp(log_alpha) * (mean log pi + target_entropy)``."""
    return -np.exp(log_alpha) * (mean_log_prob + target_entropy)


def update_temperature(log_alpha: float, mean_log_prob: float, target_entropy: float,
                       lr: float) -> float:
    return float(log_alpha - lr * temperature_gradient(log_alpha, mean_log_prob, target_entropy))
