"""Paired Monte Carlo sweeps over the CSIT error bound."""

from __future__ import annotations

import dataclasses
import hashlib
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..channel import sample_realization
from ..config import ScenarioConfig, get_scenario
from ..errors import CheckpointMismatch, ConfigError
from ..metrics import sum_rate_values
from ..mmse import mmse_precoder
from ..rslnr import rslnr_from_realization
from ..sac import SacLearner
from . import svg
from .csvio import read_csv, write_csv

DEFAULT_ERROR_GRID = (0.0, 0.01, 0.02, 0.03, 0.05, 0.075, 0.1)
BUILTIN_PRECODERS = ("mmse", "rslnr")
TRAINING_MARKER = 0.05


@dataclass(frozen=True)
class SweepSpec:
    """What to sweep. Anything in ``precoders`` that is not a built-in name is a checkpoint path.

    ``overrides`` are ScenarioConfig fields applied on top of the named
    scenario (or on the defaults when ``scenario == "custom"``).
    """

    scenario: str = "b"
    error_bounds: tuple = DEFAULT_ERROR_GRID
    monte_carlo_iters: int = 1000
    precoders: tuple = BUILTIN_PRECODERS
    seed: int = 0
    overrides: dict = field(default_factory=dict)

    def __post_init__(self):
        bounds = tuple(float(b) for b in self.error_bounds)
        object.__setattr__(self, "error_bounds", bounds)
        object.__setattr__(self, "precoders", tuple(str(p) for p in self.precoders))
        if self.monte_carlo_iters < 1:
            raise ConfigError("monte_carlo_iters must be >= 1")
        if not bounds:
            raise ConfigError("error_bounds must not be empty")
        if any(b < 0 for b in bounds) or list(bounds) != sorted(bounds):
            raise ConfigError("error_bounds must be non-negative and sorted ascending")
        if not self.precoders:
            raise ConfigError("at least one precoder is required")
        self.scenario_config()  # validates scenario name and overrides

    def scenario_config(self) -> ScenarioConfig:
        base = ScenarioConfig() if self.scenario == "custom" else get_scenario(self.scenario)
        try:
            return base.replace(**self.overrides)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["error_bounds"] = list(self.error_bounds)
        d["precoders"] = list(self.precoders)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SweepSpec":
        d = dict(d)
        d["error_bounds"] = tuple(d["error_bounds"])
        d["precoders"] = tuple(d["precoders"])
        return cls(**d)


@dataclass
class SweepResult:
    """Per-iteration sum rates, ``records[label]`` has shape ``(len(error_bounds), iters)``."""

    spec: SweepSpec
    labels: list[str]
    records: dict[str, np.ndarray]
    config_hash: str
    checkpoint_ids: dict[str, str]

    def mean(self, label: str) -> np.ndarray:
        return self.records[label].mean(axis=1)

    def std(self, label: str) -> np.ndarray:
        r = self.records[label]
        return r.std(axis=1, ddof=1) if r.shape[1] > 1 else np.zeros(r.shape[0])

    def header(self) -> dict:
        return {
            "generator": "leoprecode sweep",
            "config_hash": self.config_hash,
            "seed": str(self.spec.seed),
            "rng": "numpy default_rng([seed, iteration]) per iteration, shared by all precoders "
                   "and error bounds",
            "checkpoint_ids": self.checkpoint_ids,
            "spec": self.spec.to_dict(),
        }


def checkpoint_id(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()[:16]


def precoder_label(name: str) -> str:
    return name if name in BUILTIN_PRECODERS else f"sac:{Path(name).stem}"


def load_policy(path: str | Path, cfg: ScenarioConfig) -> SacLearner:
    learner = SacLearner.load(path)
    sc = learner.scenario
    if (sc.num_users, sc.num_antennas) != (cfg.num_users, cfg.num_antennas):
        raise CheckpointMismatch(
            f"{path}: trained for K={sc.num_users}, N={sc.num_antennas}; sweep scenario has "
            f"K={cfg.num_users}, N={cfg.num_antennas}")
    return learner


_POLICY_CACHE: dict[str, SacLearner] = {}


def _policy(path: str, cfg: ScenarioConfig) -> SacLearner:
    if path not in _POLICY_CACHE:
        _POLICY_CACHE[path] = load_policy(path, cfg)
    return _POLICY_CACHE[path]


def _evaluate_block(spec: SweepSpec, start: int, stop: int) -> dict[str, np.ndarray]:
    """Sum rates for iterations ``start..stop-1`` at every error bound."""
    cfg = spec.scenario_config()
    P, noise = cfg.transmit_power, cfg.noise_power
    n = stop - start
    out = {precoder_label(p): np.zeros((len(spec.error_bounds), n)) for p in spec.precoders}
    for b, B in enumerate(spec.error_bounds):
        world = cfg.replace(error_bound=B)
        reals = [sample_realization(world, np.random.default_rng([spec.seed, it]))
                 for it in range(start, stop)]
        H = np.stack([r.true_channel for r in reals])
        H_est = np.stack([r.estimated_channel for r in reals])
        for p in spec.precoders:
            label = precoder_label(p)
            if p == "mmse":
                W = np.stack([mmse_precoder(h, P, noise).W for h in H_est])
            elif p == "rslnr":
                W = np.stack([rslnr_from_realization(r, B, world).W for r in reals])
            else:
                W = _policy(p, cfg).precoders(H_est, mode="mean")
            out[label][b] = sum_rate_values(H, W, noise)
    return out


def _evaluate_block_args(args):
    return _evaluate_block(*args)


def run_sweep(spec: SweepSpec, workers: int = 1, block_size: int = 50) -> SweepResult:
    """Evaluate every precoder on the same realizations for every error bound.

    Iterations are split in fixed blocks; with ``workers > 1`` blocks run in
    separate processes. Results are concatenated in iteration order, so the
    output does not depend on the worker count.
    """
    cfg = spec.scenario_config()
    labels = [precoder_label(p) for p in spec.precoders]
    if len(set(labels)) != len(labels):
        raise ConfigError(f"duplicate precoder labels {labels}")
    ids = {}
    for p in spec.precoders:
        if p not in BUILTIN_PRECODERS:
            load_policy(p, cfg)  # fail early on unreadable or mismatched checkpoints
            ids[precoder_label(p)] = checkpoint_id(p)
    blocks = [(spec, s, min(s + block_size, spec.monte_carlo_iters))
              for s in range(0, spec.monte_carlo_iters, block_size)]
    if workers > 1 and len(blocks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_evaluate_block_args, blocks))
    else:
        parts = [_evaluate_block_args(b) for b in blocks]
    records = {lab: np.concatenate([part[lab] for part in parts], axis=1) for lab in labels}
    return SweepResult(spec, labels, records, cfg.config_hash(), ids)


SUMMARY_COLUMNS = ["precoder", "error_bound", "mean_sum_rate", "std_sum_rate", "iterations"]


def write_sweep_outputs(result: SweepResult, out_dir: str | Path) -> dict[str, Path]:
    """Write ``sweep_summary.csv``, ``sweep_records.csv`` and ``sweep.svg`` into ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    spec, header = result.spec, result.header()
    iters = spec.monte_carlo_iters
    summary = []
    for lab in result.labels:
        for B, m, s in zip(spec.error_bounds, result.mean(lab), result.std(lab)):
            summary.append([lab, B, float(m), float(s), iters])
    paths = {"summary": out / "sweep_summary.csv", "records": out / "sweep_records.csv",
             "plot": out / "sweep.svg"}
    write_csv(paths["summary"], header, SUMMARY_COLUMNS, summary)
    rows = []
    for b, B in enumerate(spec.error_bounds):
        for it in range(iters):
            rows.append([it, B] + [float(result.records[lab][b, it]) for lab in result.labels])
    write_csv(paths["records"], header, ["iteration", "error_bound"] + result.labels, rows)
    paths["plot"].write_text(svg.line_plot(
        spec.error_bounds, {lab: result.mean(lab) for lab in result.labels},
        errors={lab: result.std(lab) for lab in result.labels},
        title=f"scenario {spec.scenario}: mean sum rate over {iters} iterations",
        xlabel="error bound B", ylabel="sum rate [bit/s/Hz]",
        vlines=[(TRAINING_MARKER, "training error bound", "dashed")]
        if spec.error_bounds[0] <= TRAINING_MARKER <= spec.error_bounds[-1] else ()))
    return paths


def spec_from_output(path: str | Path) -> SweepSpec:
    """Recover the spec embedded in a sweep CSV header (for exact replays)."""
    header, _, _ = read_csv(path)
    if "spec" not in header:
        raise ConfigError(f"{path} carries no sweep spec header")
    return SweepSpec.from_dict(json.loads(header["spec"]))
