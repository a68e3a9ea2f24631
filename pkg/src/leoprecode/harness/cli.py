"""Command-line entry point: ``leoprecode {train,sweep,beampattern,calibrate,inspect-checkpoint}``."""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path

import numpy as np

from ..config import SCENARIOS, ScenarioConfig, get_scenario, load_config
from ..errors import LeoPrecodeError
from ..neural import load_container, save_container
from ..sac import TINY_SAC, SacConfig, calibrate_standardization
from .beams import run_beam_pattern, write_beam_outputs
from .sweep import DEFAULT_ERROR_GRID, SweepSpec, run_sweep, spec_from_output, write_sweep_outputs
from .training import run_training

SAC_PRESETS = {"full": SacConfig(), "tiny": TINY_SAC}
_SCENARIO_FIELDS = [f for f in dataclasses.fields(ScenarioConfig) if f.name != "rng_seed"]


def _bool(text: str) -> bool:
    if text.lower() in ("1", "true", "yes", "on"):
        return True
    if text.lower() in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"not a boolean: {text!r}")


def _field_parser(f):
    t = str(f.type)
    if "bool" in t:
        return _bool
    if "int" in t and "float" not in t:
        return int
    if "str" in t:
        return str
    return float


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def add_scenario_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("scenario")
    g.add_argument("--scenario", default="b", help=f"one of {sorted(SCENARIOS)} or 'custom'")
    g.add_argument("--config", type=Path, help="key = value scenario file applied on top")
    for f in _SCENARIO_FIELDS:
        g.add_argument("--" + f.name.replace("_", "-"), dest=f.name, type=_field_parser(f),
                       default=None, help="linear units" if f.name in ("sat_gain", "user_gain")
                       else None)


def scenario_overrides(args) -> dict:
    return {f.name: getattr(args, f.name) for f in _SCENARIO_FIELDS
            if getattr(args, f.name, None) is not None}


def scenario_from_args(args) -> ScenarioConfig:
    base = ScenarioConfig() if args.scenario == "custom" else get_scenario(args.scenario)
    if args.config is not None:
        base = load_config(args.config, base)
    return base.replace(**scenario_overrides(args))


def cmd_train(args) -> int:
    cfg = scenario_from_args(args)
    sac = SAC_PRESETS[args.preset]
    changes = {"total_steps": args.steps, "train_error_bound": args.train_error_bound}
    if args.transform:
        changes["transform"] = args.transform
    sac = sac.replace(**changes)
    result = run_training(cfg, sac, args.seed, args.out, eval_every=args.eval_every,
                          eval_samples=args.eval_samples, eval_seed=args.eval_seed)
    print(f"final checkpoint: {result.final_checkpoint}")
    print(f"best checkpoint:  {result.best_checkpoint} (eval sum rate {result.best_eval:.4f})")
    print(f"diagnostics:      {result.diagnostics}")
    return 0


def cmd_sweep(args) -> int:
    if args.replay is not None:
        spec = spec_from_output(args.replay)
    else:
        overrides = scenario_overrides(args)
        if args.config is not None:
            base = ScenarioConfig() if args.scenario == "custom" else get_scenario(args.scenario)
            overrides = {**load_config(args.config, base).to_dict(), **overrides}
        spec = SweepSpec(args.scenario, tuple(args.error_bounds), args.iters,
                         tuple(args.precoders), args.seed, overrides)
    result = run_sweep(spec, workers=args.workers)
    paths = write_sweep_outputs(result, args.out)
    for lab in result.labels:
        means = ", ".join(f"{m:.3f}" for m in result.mean(lab))
        print(f"{lab:>16}: {means}")
    print("wrote " + ", ".join(str(p) for p in paths.values()))
    return 0


def cmd_beampattern(args) -> int:
    cfg = scenario_from_args(args)
    grid = np.linspace(args.grid_start, args.grid_stop, args.grid_points)
    result = run_beam_pattern(cfg, args.seed, args.precoders, grid)
    paths = write_beam_outputs(result, args.out)
    for lab, rate in result.sum_rates.items():
        print(f"{lab:>16}: {rate:.3f} bit/s/Hz")
    print("wrote " + ", ".join(str(p) for p in paths.values()))
    return 0


def cmd_calibrate(args) -> int:
    cfg = scenario_from_args(args)
    stats = calibrate_standardization(cfg, np.random.default_rng(args.seed), args.samples,
                                      args.transform)
    save_container(args.out, {"mean": stats.mean, "scale": stats.scale},
                   {"kind": "standardization", "scenario": cfg.to_dict(), "seed": args.seed,
                    "sample_count": stats.sample_count, "transform": stats.transform})
    print(f"dimensions: {stats.mean.size}, samples: {stats.sample_count}, "
          f"transform: {stats.transform}")
    print(f"scale range: [{stats.scale.min():.4g}, {stats.scale.max():.4g}]")
    print(f"wrote {args.out}")
    return 0


def cmd_inspect(args) -> int:
    arrays, meta = load_container(args.checkpoint)
    summary = {k: v for k, v in meta.items() if not k.startswith("rng_")}
    print(json.dumps(summary, indent=2, sort_keys=True))
    for name in sorted(arrays):
        a = arrays[name]
        print(f"{name:28s} {str(a.dtype):8s} {a.shape}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="leoprecode",
                                     description="LEO satellite downlink precoding simulator")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train a SAC precoder")
    add_scenario_args(p)
    p.add_argument("--preset", choices=sorted(SAC_PRESETS), default="tiny")
    p.add_argument("--steps", type=int, default=200_000, help="simulation steps")
    p.add_argument("--train-error-bound", type=float, default=0.0)
    p.add_argument("--transform", choices=["magnitude-phase", "real-imag"])
    p.add_argument("--eval-every", type=int, default=10_000)
    p.add_argument("--eval-samples", type=int, default=200)
    p.add_argument("--eval-seed", type=int, default=12345)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, required=True, help="output directory")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("sweep", help="Monte Carlo sweep over error bounds")
    add_scenario_args(p)
    p.add_argument("--error-bounds", type=_floats, default=list(DEFAULT_ERROR_GRID),
                   help="comma-separated, ascending")
    p.add_argument("--iters", type=int, default=1000)
    p.add_argument("--precoders", nargs="+", default=["mmse", "rslnr"],
                   help="mmse, rslnr and/or SAC checkpoint paths")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--replay", type=Path, help="rerun the spec stored in a sweep CSV header")
    p.add_argument("--out", type=Path, required=True, help="output directory")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("beampattern", help="beam patterns of one realization")
    add_scenario_args(p)
    p.add_argument("--precoders", nargs="+", default=["mmse", "rslnr"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--grid-start", type=float, default=60.0, help="degrees")
    p.add_argument("--grid-stop", type=float, default=120.0, help="degrees")
    p.add_argument("--grid-points", type=int, default=1201)
    p.add_argument("--out", type=Path, required=True, help="output directory")
    p.set_defaults(func=cmd_beampattern)

    p = sub.add_parser("calibrate", help="estimate state standardization statistics")
    add_scenario_args(p)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--transform", choices=["magnitude-phase", "real-imag"],
                   default="magnitude-phase")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, required=True, help="output file")
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("inspect-checkpoint", help="print checkpoint metadata and array shapes")
    p.add_argument("checkpoint", type=Path)
    p.set_defaults(func=cmd_inspect)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (LeoPrecodeError, ValueError, OSError, KeyError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
