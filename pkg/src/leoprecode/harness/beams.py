"""Beam-pattern export for one channel realization."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from ..channel import sample_realization
from ..config import ScenarioConfig
from ..metrics import PrecodingMatrix, beam_pattern, sum_rate
from ..mmse import mmse_precoder
from ..rslnr import rslnr_from_realization
from . import svg
from .csvio import write_csv
from .sweep import BUILTIN_PRECODERS, checkpoint_id, load_policy, precoder_label


@dataclass
class BeamPatternResult:
    scenario: ScenarioConfig
    seed: int
    grid_deg: np.ndarray
    gains: dict[str, np.ndarray]  # label -> (K, G)
    sum_rates: dict[str, float]
    true_aod_deg: np.ndarray
    estimated_aod_deg: np.ndarray
    checkpoint_ids: dict[str, str]


def _aod_deg(space_angle) -> np.ndarray:
    return np.rad2deg(np.arccos(np.clip(space_angle, -1.0, 1.0)))


def compute_precoder(name: str, realization, cfg: ScenarioConfig) -> PrecodingMatrix:
    if name == "mmse":
        return mmse_precoder(realization.estimated_channel, cfg.transmit_power, cfg.noise_power)
    if name == "rslnr":
        return rslnr_from_realization(realization, cfg.error_bound, cfg)
    W = load_policy(name, cfg).precoders(realization.estimated_channel[None], mode="mean")[0]
    return PrecodingMatrix(W, cfg.transmit_power)


def run_beam_pattern(cfg: ScenarioConfig, seed: int, precoders: Sequence[str] = BUILTIN_PRECODERS,
                     grid_deg: Sequence[float] | None = None) -> BeamPatternResult:
    """Draw one realization from ``default_rng(seed)`` and evaluate each precoder's beams.

    The error bound is taken from ``cfg``. The default grid spans 60..120 degrees
    in 0.05 degree steps.
    """
    grid = (np.linspace(60.0, 120.0, 1201) if grid_deg is None
            else np.asarray(grid_deg, dtype=float))
    r = sample_realization(cfg, np.random.default_rng(seed))
    gains, rates, ids = {}, {}, {}
    for name in precoders:
        label = precoder_label(name)
        W = compute_precoder(name, r, cfg)
        gains[label] = beam_pattern(W, cfg, np.deg2rad(grid))
        rates[label] = sum_rate(r.true_channel, W, cfg.noise_power).sum_rate
        if name not in BUILTIN_PRECODERS:
            ids[label] = checkpoint_id(name)
    true_aod = _aod_deg([u.space_angle for u in r.users])
    est_aod = _aod_deg(r.estimated_space_angles)
    return BeamPatternResult(cfg, seed, grid, gains, rates, true_aod, est_aod, ids)


def write_beam_outputs(result: BeamPatternResult, out_dir: str | Path) -> dict[str, Path]:
    """Write ``beampattern.csv`` (aod_deg then one column per precoder and user) and an SVG."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    K = result.scenario.num_users
    columns = ["aod_deg"]
    stacked = []
    for label, g in result.gains.items():
        columns += [f"{label}_user{k}" for k in range(K)]
        stacked.append(g)
    table = np.vstack([result.grid_deg[None, :]] + stacked).T
    header = {
        "generator": "leoprecode beampattern",
        "config_hash": result.scenario.config_hash(),
        "seed": str(result.seed),
        "scenario": result.scenario.to_dict(),
        "sum_rates": {k: float(v) for k, v in result.sum_rates.items()},
        "true_aod_deg": [float(a) for a in result.true_aod_deg],
        "estimated_aod_deg": [float(a) for a in result.estimated_aod_deg],
        "checkpoint_ids": result.checkpoint_ids,
    }
    paths = {"table": out / "beampattern.csv", "plot": out / "beampattern.svg"}
    write_csv(paths["table"], header, columns, ([float(v) for v in row] for row in table))
    series = {f"{label} u{k} ({result.sum_rates[label]:.2f} bit/s/Hz)": g[k]
              for label, g in result.gains.items() for k in range(K)}
    marks = ([(a, f"user {k} true AoD", "solid") for k, a in enumerate(result.true_aod_deg)]
             + [(a, f"user {k} estimated AoD", "dashed")
                for k, a in enumerate(result.estimated_aod_deg)])
    paths["plot"].write_text(svg.line_plot(
        result.grid_deg, series, title=f"beam pattern, seed {result.seed}, "
        f"B = {result.scenario.error_bound:g}", xlabel="AoD [deg]", ylabel="|a(cos e) w_k|",
        vlines=marks))
    return paths
