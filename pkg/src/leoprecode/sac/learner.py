"""Soft actor-critic learner for a contextual-bandit precoding task.

The reward of an action is the immediate sum rate on the true channel, so
critics regress ``Q(s, a) -> R`` directly: no bootstrapping, no discount,
no target networks.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..channel import sample_channel_batch
from ..config import ScenarioConfig
from ..errors import CheckpointMismatch
from ..metrics import sum_rate_values
from ..neural import Adam, CosineDecay, MlpNetwork, load_container, save_container
from .buffer import ExperienceBuffer
from .losses import actor_loss, critic_loss, update_temperature
from .policy import sample_action
from .transforms import (StandardizationStats, actions_to_precoders, calibrate_standardization,
                         state_from_estimate)


@dataclass(frozen=True)
class SacConfig:
    """Learning hyperparameters. Defaults follow the full-scale setup."""

    hidden_widths: tuple = (512, 512, 512, 512)
    batch_size: int = 1024
    buffer_capacity: int = 100_000
    critic_lr: float = 1e-4
    actor_lr: float = 1e-5
    lr_final_fraction: float = 0.01
    # simulation steps; the cosine horizon is total_steps // inference_per_learning
    total_steps: int = 1_000_000
    inference_per_learning: int = 10
    critic_l2: float = 0.1
    actor_l2: float = 0.1
    num_critics: int = 2
    transform: str = "magnitude-phase"
    calibration_samples: int = 100
    auto_temperature: bool = True
    initial_log_alpha: float = -3.0
    temperature_lr: float = 1e-4
    target_entropy: float | None = None  # None -> -2KN
    leaky_slope: float = 0.01
    bn_momentum: float = 0.99
    bn_epsilon: float = 1e-5
    train_error_bound: float = 0.0

    def replace(self, **changes) -> "SacConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["hidden_widths"] = list(self.hidden_widths)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SacConfig":
        d = dict(d)
        d["hidden_widths"] = tuple(d["hidden_widths"])
        return cls(**d)

    @property
    def learning_horizon(self) -> int:
        return self.total_steps // self.inference_per_learning


# Reduced setup for desk-scale runs on the "tiny" scenario.
TINY_SAC = SacConfig(
    hidden_widths=(128, 128),
    batch_size=256,
    buffer_capacity=100_000,
    critic_lr=1e-3,
    actor_lr=3e-4,
    critic_l2=1e-4,
    actor_l2=1e-4,
    total_steps=200_000,
)


class SacLearner:
    """Owns the actor, critics, optimizers, replay buffer and random streams.

    Parameters
    ----------
    scenario
        Physical scenario; its ``error_bound`` is replaced by
        ``config.train_error_bound`` for data generation.
    config
        Learning hyperparameters.
    seed
        Master seed. Independent child streams drive network initialization,
        standardization, channel sampling and policy/batch sampling.
    """

    def __init__(self, scenario: ScenarioConfig, config: SacConfig = SacConfig(), seed: int = 0,
                 *, calibrate: bool = True):
        self.scenario = scenario
        self.config = config
        self.seed = seed
        self.world = scenario.replace(error_bound=config.train_error_bound)
        K, N = scenario.num_users, scenario.num_antennas
        self.state_dim = 2 * K * N
        self.action_dim = 2 * K * N
        init_ss, calib_ss, env_ss, learn_ss = np.random.SeedSequence(seed).spawn(4)
        init_rng = np.random.default_rng(init_ss)
        self.env_rng = np.random.default_rng(env_ss)
        self.learn_rng = np.random.default_rng(learn_ss)

        net_kwargs = dict(leaky_slope=config.leaky_slope, bn_momentum=config.bn_momentum,
                          bn_epsilon=config.bn_epsilon)
        self.actor = MlpNetwork(self.state_dim, 2 * self.action_dim, config.hidden_widths,
                                rng=init_rng, **net_kwargs)
        self.critics = [MlpNetwork(self.state_dim + self.action_dim, 1, config.hidden_widths,
                                   rng=init_rng, **net_kwargs)
                        for _ in range(config.num_critics)]
        horizon = config.learning_horizon
        self.actor_opt = Adam(self.actor.params.size,
                              CosineDecay(config.actor_lr, horizon, config.lr_final_fraction))
        self.critic_opts = [Adam(c.params.size,
                                 CosineDecay(config.critic_lr, horizon, config.lr_final_fraction))
                            for c in self.critics]
        self.log_alpha = float(config.initial_log_alpha)
        self.target_entropy = (float(config.target_entropy) if config.target_entropy is not None
                               else -float(self.action_dim))
        self.buffer = ExperienceBuffer(config.buffer_capacity, self.state_dim, self.action_dim)
        if calibrate:
            self.stats = calibrate_standardization(self.world, np.random.default_rng(calib_ss),
                                                   config.calibration_samples, config.transform)
        else:
            self.stats = StandardizationStats(transform=config.transform)
        self.simulation_steps = 0
        self.learning_steps = 0
        self.last_inference = None

    # -- data generation -------------------------------------------------

    def inference_steps(self, count: int) -> dict:
        """Run ``count`` inference steps and push their tuples to the buffer.

        The actor's parameters do not change between these steps, so the
        batch is evaluated in one pass.
        """
        sc = self.scenario
        H, H_est = sample_channel_batch(self.world, self.env_rng, count)
        states = state_from_estimate(H_est, self.stats)
        action = sample_action(self.actor, states, self.learn_rng, mode="stochastic")
        W = actions_to_precoders(action.a, sc.transmit_power, sc.num_users, sc.num_antennas)
        rewards = sum_rate_values(H, W, sc.noise_power)
        self.buffer.push(states, action.a, rewards)
        self.simulation_steps += count
        self.last_inference = {"true_channel": H, "estimated_channel": H_est, "states": states,
                               "actions": action.a, "precoders": W, "rewards": rewards}
        return {"mean_reward": float(rewards.mean())}

    # -- parameter updates -----------------------------------------------

    def learning_step(self) -> dict:
        cfg = self.config
        batch = self.buffer.sample(cfg.batch_size, self.learn_rng)
        c_losses = []
        for critic, opt in zip(self.critics, self.critic_opts):
            c_losses.append(critic_loss(critic, *batch, cfg.critic_l2))
            opt.step(critic.params, critic.grads)
        a_loss, info = actor_loss(self.actor, self.critics, batch[0], self.log_alpha, cfg.actor_l2,
                                  rng=self.learn_rng)
        self.actor_opt.step(self.actor.params, self.actor.grads)
        mean_log_prob = float(info["log_prob"].mean())
        if cfg.auto_temperature:
            self.log_alpha = update_temperature(self.log_alpha, mean_log_prob,
                                                self.target_entropy, cfg.temperature_lr)
        self.learning_steps += 1
        return {"critic_losses": c_losses, "actor_loss": a_loss, "mean_log_prob": mean_log_prob}

    def train_step(self) -> dict:
        """One cycle: ``inference_per_learning`` inference steps, then one learning step.

        Learning is skipped while the buffer holds fewer than ``batch_size``
        tuples.
        """
        cfg = self.config
        diag = {
            "step": self.simulation_steps + cfg.inference_per_learning,
            "actor_lr": self.actor_opt.lr,
            "critic_lr": self.critic_opts[0].lr,
        }
        diag.update(self.inference_steps(cfg.inference_per_learning))
        if len(self.buffer) >= cfg.batch_size:
            diag.update(self.learning_step())
            diag["learned"] = True
        else:
            diag["learned"] = False
        diag["alpha"] = float(np.exp(self.log_alpha))
        return diag

    # -- evaluation ------------------------------------------------------

    def precoders(self, H_est: np.ndarray, mode: str = "mean",
                  rng: np.random.Generator | None = None) -> np.ndarray:
        """Precoders ``(B, N, K)`` for a batch of channel estimates ``(B, K, N)``."""
        sc = self.scenario
        states = state_from_estimate(H_est, self.stats)
        action = sample_action(self.actor, states, rng, mode=mode)
        return actions_to_precoders(action.a, sc.transmit_power, sc.num_users, sc.num_antennas)

    def evaluate(self, H: np.ndarray, H_est: np.ndarray) -> np.ndarray:
        """Mean-action sum rate on each realization of a batch."""
        return sum_rate_values(H, self.precoders(H_est), self.scenario.noise_power)

    # -- checkpoints -----------------------------------------------------

    def state_arrays(self) -> dict:
        arrays = {
            "actor.params": self.actor.params,
            "actor.running_stats": self.actor.running_stats(),
            "actor.adam.m": self.actor_opt.first_moment,
            "actor.adam.v": self.actor_opt.second_moment,
            "stats.mean": self.stats.mean,
            "stats.scale": self.stats.scale,
        }
        for i, (c, opt) in enumerate(zip(self.critics, self.critic_opts)):
            arrays[f"critic{i}.params"] = c.params
            arrays[f"critic{i}.running_stats"] = c.running_stats()
            arrays[f"critic{i}.adam.m"] = opt.first_moment
            arrays[f"critic{i}.adam.v"] = opt.second_moment
        return arrays

    def state_meta(self) -> dict:
        return {
            "kind": "sac-precoder",
            "scenario": self.scenario.to_dict(),
            "sac": self.config.to_dict(),
            "seed": self.seed,
            "actor_arch": self.actor.architecture(),
            "critic_arch": self.critics[0].architecture(),
            "log_alpha": self.log_alpha,
            "target_entropy": self.target_entropy,
            "actor_adam_steps": self.actor_opt.step_count,
            "critic_adam_steps": [o.step_count for o in self.critic_opts],
            "simulation_steps": self.simulation_steps,
            "learning_steps": self.learning_steps,
            "stats_transform": self.stats.transform,
            "stats_sample_count": self.stats.sample_count,
            "rng_env": self.env_rng.bit_generator.state,
            "rng_learn": self.learn_rng.bit_generator.state,
        }

    def save(self, path: str | Path) -> None:
        save_container(path, self.state_arrays(), self.state_meta())

    @classmethod
    def load(cls, path: str | Path) -> "SacLearner":
        arrays, meta = load_container(path)
        if meta.get("kind") != "sac-precoder":
            raise CheckpointMismatch(f"{path}: not a SAC precoder checkpoint")
        scenario = ScenarioConfig.from_dict(meta["scenario"])
        learner = cls(scenario, SacConfig.from_dict(meta["sac"]), meta["seed"], calibrate=False)
        learner.actor.params[...] = arrays["actor.params"]
        learner.actor.set_running_stats(arrays["actor.running_stats"])
        learner.actor_opt.load_state({"first_moment": arrays["actor.adam.m"],
                                      "second_moment": arrays["actor.adam.v"],
                                      "step_count": meta["actor_adam_steps"]})
        for i, (c, opt) in enumerate(zip(learner.critics, learner.critic_opts)):
            c.params[...] = arrays[f"critic{i}.params"]
            c.set_running_stats(arrays[f"critic{i}.running_stats"])
            opt.load_state({"first_moment": arrays[f"critic{i}.adam.m"],
                            "second_moment": arrays[f"critic{i}.adam.v"],
                            "step_count": meta["critic_adam_steps"][i]})
        learner.stats = StandardizationStats(arrays["stats.mean"], arrays["stats.scale"],
                                             meta["stats_sample_count"], meta["stats_transform"])
        learner.log_alpha = meta["log_alpha"]
        learner.target_entropy = meta["target_entropy"]
        learner.simulation_steps = meta["simulation_steps"]
        learner.learning_steps = meta["learning_steps"]
        learner.env_rng.bit_generator.state = meta["rng_env"]
        learner.learn_rng.bit_generator.state = meta["rng_learn"]
        return learner
