"""Training runs: calibrate, loop, evaluate on a held-out set, checkpoint."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..channel import sample_channel_batch
from ..config import ScenarioConfig
from ..errors import NonFiniteGradient
from ..sac import SacConfig, SacLearner
from .csvio import write_csv

log = logging.getLogger(__name__)

DIAGNOSTIC_COLUMNS = ["step", "learning_steps", "actor_lr", "critic_lr", "mean_reward", "alpha",
                      "actor_loss", "mean_log_prob", "critic_loss_min", "critic_loss_max",
                      "eval_sum_rate"]


@dataclass
class TrainingResult:
    learner: SacLearner
    final_checkpoint: Path
    best_checkpoint: Path
    diagnostics: Path
    best_eval: float
    evaluations: list[tuple[int, float]]


def run_training(scenario: ScenarioConfig, config: SacConfig, seed: int, out_dir: str | Path, *,
                 eval_every: int = 10_000, eval_samples: int = 200, eval_seed: int = 12345,
                 eval_error_bound: float | None = None, log_every: int = 1_000) -> TrainingResult:
    """Train a SAC precoder for ``config.total_steps`` simulation steps.

    Every ``eval_every`` simulation steps (and at the end) the mean-action sum
    rate is measured on ``eval_samples`` held-out realizations drawn from
    ``default_rng(eval_seed)`` at ``eval_error_bound`` (default: the training
    bound). Writes ``final.ckpt``, ``best.ckpt`` and ``diagnostics.csv`` into
    ``out_dir``. On a non-finite gradient the current state is dumped to
    ``failure.ckpt`` before the error propagates.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    learner = SacLearner(scenario, config, seed)
    B_eval = config.train_error_bound if eval_error_bound is None else eval_error_bound
    H, H_est = sample_channel_batch(scenario.replace(error_bound=B_eval),
                                    np.random.default_rng(eval_seed), eval_samples)
    paths = {"final": out / "final.ckpt", "best": out / "best.ckpt",
             "diag": out / "diagnostics.csv", "failure": out / "failure.ckpt"}

    rows, evaluations = [], []
    best = -np.inf
    per_cycle = config.inference_per_learning
    next_eval = eval_every
    next_log = log_every

    def evaluate():
        nonlocal best
        value = float(learner.evaluate(H, H_est).mean())
        evaluations.append((learner.simulation_steps, value))
        if value > best:
            best = value
            learner.save(paths["best"])
        return value

    if config.total_steps <= 0:
        evaluate()
    while learner.simulation_steps < config.total_steps:
        try:
            diag = learner.train_step()
        except NonFiniteGradient:
            learner.save(paths["failure"])
            log.error("non-finite gradient at step %d; state dumped to %s",
                      learner.simulation_steps, paths["failure"])
            raise
        step = learner.simulation_steps
        eval_value = ""
        if step >= next_eval or step >= config.total_steps:
            eval_value = evaluate()
            next_eval += eval_every
            log.info("step %d: eval sum rate %.4f (best %.4f)", step, eval_value, best)
        if step >= next_log or eval_value != "":
            next_log = step + log_every
            losses = diag.get("critic_losses")
            rows.append([step, learner.learning_steps, diag["actor_lr"], diag["critic_lr"],
                         diag["mean_reward"], diag["alpha"], diag.get("actor_loss", ""),
                         diag.get("mean_log_prob", ""), min(losses) if losses else "",
                         max(losses) if losses else "", eval_value])
    learner.save(paths["final"])
    header = {
        "generator": "leoprecode train",
        "config_hash": scenario.config_hash(),
        "seed": str(seed),
        "scenario": scenario.to_dict(),
        "sac": config.to_dict(),
        "evaluation": {"samples": eval_samples, "seed": eval_seed, "error_bound": B_eval},
    }
    write_csv(paths["diag"], header, DIAGNOSTIC_COLUMNS, rows)
    return TrainingResult(learner, paths["final"], paths["best"], paths["diag"], best,
                          evaluations)
