from .buffer import ExperienceBuffer
from .learner import TINY_SAC, SacConfig, SacLearner
from .losses import actor_loss, critic_loss, critic_losses, update_temperature
from .policy import ActionVector, PolicyOutput, gaussian_log_prob, sample_action, split_output
from .transforms import (StandardizationStats, actions_to_precoders, calibrate_standardization,
                         decompose, precoder_from_action, state_from_estimate)

__all__ = [
    "ActionVector", "ExperienceBuffer", "PolicyOutput", "SacConfig", "SacLearner",
    "StandardizationStats", "TINY_SAC", "actions_to_precoders", "actor_loss",
    "calibrate_standardization", "critic_loss", "critic_losses", "decompose",
    "gaussian_log_prob", "precoder_from_action", "sample_action", "split_output",
    "state_from_estimate", "update_temperature",
]
