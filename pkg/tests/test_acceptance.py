"""Acceptance suite: one test per criterion, each printing a single PASS/FAIL line.

Criteria 9 and 10 train six small SAC policies (about 40 minutes on one CPU
core); the trained checkpoints are shared through a session fixture.
Run on its own with ``pytest tests/test_acceptance.py -v -s``.
"""

from __future__ import annotations

import time

import numpy as np
import pytest
from fd import central_difference, relative_error
from scipy.linalg import eigh

from leoprecode.channel import (apply_aod_error, channel_vector, sample_channel_batch,
                                sample_realization, steering_vector)
from leoprecode.config import ScenarioConfig, get_scenario
from leoprecode.harness import SweepSpec, run_sweep, run_training
from leoprecode.harness.cli import main
from leoprecode.metrics import beam_pattern, half_power_beamwidth, sum_rate_values
from leoprecode.mmse import mmse_precoder
from leoprecode.neural import MlpNetwork
from leoprecode.rslnr import (characteristic_uniform, rslnr_from_realization, rslnr_matrices,
                              steering_autocorrelation)
from leoprecode.sac import TINY_SAC, actor_loss, critic_loss, precoder_from_action

TRAIN_STEPS = 200_000
SEEDS = (0, 1, 2)


def report(capsys, number: int, passed: bool, detail: str) -> None:
    line = f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}"
    with capsys.disabled():
        print("\n" + line)


# -- 1 ---------------------------------------------------------------------

def test_criterion_01_analytic_identities(capsys):
    t0 = time.perf_counter()
    worst = 0.0
    ok = True
    for seed in range(20):
        rng = np.random.default_rng(seed)
        cfg = get_scenario("b", error_bound=0.1)
        r = sample_realization(cfg, rng)
        P = cfg.transmit_power
        Wm = mmse_precoder(r.estimated_channel, P, cfg.noise_power)
        worst = max(worst, abs(Wm.total_power - P) / P)
        Wr = rslnr_from_realization(r, 0.1, cfg)
        worst = max(worst, np.max(np.abs(Wr.column_powers() - P / 3)) / (P / 3))
        Ws = precoder_from_action(rng.normal(size=2 * 3 * 16), P, 3, 16)
        worst = max(worst, abs(Ws.total_power - P) / P)
        ok &= bool(np.allclose(np.abs(r.estimated_channel), np.abs(r.true_channel), rtol=1e-12,
                               atol=0))
        # multiplicative error equals recomputing the channel at the shifted angle
        for u, d, h in zip(r.users, r.angle_errors, r.true_channel):
            shifted = type(u)(**{**u.__dict__, "space_angle": u.space_angle + d})
            err = np.max(np.abs(apply_aod_error(h, d, cfg) - channel_vector(shifted, cfg)))
            ok &= bool(err <= 1e-12 * np.max(np.abs(h)))
    elapsed = time.perf_counter() - t0
    passed = ok and worst < 1e-9 and elapsed < 1.0
    report(capsys, 1, passed, f"max power rel err {worst:.1e}, identities {'ok' if ok else 'bad'}, "
           f"{elapsed:.2f} s (< 1 s)")
    assert passed


# -- 2 ---------------------------------------------------------------------

def test_criterion_02_characteristic_function(capsys):
    t0 = time.perf_counter()
    cfg = ScenarioConfig()
    c = 2 * np.pi * cfg.antenna_spacing / cfg.wavelength
    t_grid = c * np.arange(cfg.num_antennas)
    worst = 0.0
    for i, B in enumerate((0.01, 0.05, 0.1)):
        d = np.random.default_rng(i).uniform(-B, B, 1_000_000)
        for t in t_grid:
            mc = np.mean(np.exp(1j * t * d))
            worst = max(worst, abs(mc - characteristic_uniform(t, B)))
    elapsed = time.perf_counter() - t0
    passed = worst < 3e-3 and elapsed < 10
    report(capsys, 2, passed, f"max |MC - sinc| {worst:.2e} (< 3e-3), {elapsed:.1f} s (< 10 s)")
    assert passed


# -- 3 ---------------------------------------------------------------------

def test_criterion_03_autocorrelation(capsys):
    t0 = time.perf_counter()
    cfg = ScenarioConfig(num_antennas=16)
    worst, invariants = 0.0, True
    for i, (phi_hat, B) in enumerate(((0.1, 0.05), (-0.2, 0.1))):
        R = steering_autocorrelation(phi_hat, B, cfg).R
        rng = np.random.default_rng(100 + i)
        acc = np.zeros((16, 16), dtype=complex)
        for _ in range(10):
            V = steering_vector(phi_hat - rng.uniform(-B, B, 100_000), cfg)
            acc += V.conj().T @ V
        worst = max(worst, np.max(np.abs(acc / 1_000_000 - R)))
        invariants &= bool(np.array_equal(R, R.conj().T))
        invariants &= bool(np.all(np.diag(R) == 1.0))
        invariants &= bool(np.linalg.eigvalsh(R).min() >= -1e-12)
    elapsed = time.perf_counter() - t0
    passed = worst < 3e-3 and invariants and elapsed < 30
    report(capsys, 3, passed, f"max entry err {worst:.2e} (< 3e-3), Hermitian/unit-diag/PSD "
           f"{'ok' if invariants else 'violated'}, {elapsed:.1f} s (< 30 s)")
    assert passed


# -- 4 ---------------------------------------------------------------------

def test_criterion_04_eigen_oracle(capsys):
    t0 = time.perf_counter()
    worst = 1.0
    for i in range(100):
        rng = np.random.default_rng([4, i])
        N = 10 if i % 2 else 16
        B = rng.uniform(0.0, 0.1)
        cfg = ScenarioConfig(num_antennas=N, num_users=3, error_bound=B)
        r = sample_realization(cfg, rng)
        W = rslnr_from_realization(r, B, cfg, method="power").W
        weighted, reg = rslnr_matrices(list(zip(r.estimated_space_angles, r.path_losses)), B, cfg)
        total = sum(weighted) + reg
        for k in range(3):
            # dense oracle: generalized Hermitian eigenproblem, largest eigenvalue
            _, vecs = eigh(weighted[k], total - weighted[k])
            v = vecs[:, -1]
            w = W[:, k]
            cos = abs(np.vdot(v, w)) / (np.linalg.norm(v) * np.linalg.norm(w))
            worst = min(worst, cos)
    elapsed = time.perf_counter() - t0
    passed = worst > 1 - 1e-8 and elapsed < 5
    report(capsys, 4, passed, f"min direction cosine 1-{1 - worst:.1e} (> 1-1e-8), "
           f"{elapsed:.2f} s (< 5 s)")
    assert passed


# -- 5 ---------------------------------------------------------------------

def test_criterion_05_gradients(capsys):
    t0 = time.perf_counter()
    rng = np.random.default_rng(5)
    errors = {}

    net = MlpNetwork(4, 3, (6, 5), rng=np.random.default_rng(1))
    x, U = rng.normal(size=(7, 4)), rng.normal(size=(7, 3))
    net.forward(x, training=True)
    dx = net.backward(U)
    f = lambda: float((net.forward(x, training=True) * U).sum())  # noqa: E731
    errors["network params"] = relative_error(net.grads, central_difference(f, net.params))
    errors["network input"] = relative_error(dx, central_difference(f, x))

    s, a, r = rng.normal(size=(8, 4)), rng.normal(size=(8, 4)), rng.uniform(0, 5, 8)
    critic = MlpNetwork(8, 1, (6, 5), rng=np.random.default_rng(2))
    critic_loss(critic, s, a, r, 0.1)
    g = critic.grads.copy()
    errors["critic loss"] = relative_error(g, central_difference(
        lambda: critic_loss(critic, s, a, r, 0.1, compute_grad=False), critic.params))

    actor = MlpNetwork(4, 8, (6, 5), rng=np.random.default_rng(3))
    critics = [MlpNetwork(8, 1, (6, 5), rng=np.random.default_rng(i)) for i in (4, 6)]
    for c in critics:
        c.set_running_stats(rng.uniform(0.5, 1.5, c.running_stats().size))
    noise = rng.normal(size=(8, 4))
    actor_loss(actor, critics, s, -1.0, 0.1, noise=noise)
    g = actor.grads.copy()
    errors["actor loss"] = relative_error(g, central_difference(
        lambda: actor_loss(actor, critics, s, -1.0, 0.1, noise=noise, compute_grad=False)[0],
        actor.params))
    elapsed = time.perf_counter() - t0
    worst = max(errors.values())
    passed = worst < 1e-4 and elapsed < 60
    detail = ", ".join(f"{k} {v:.1e}" for k, v in errors.items())
    report(capsys, 5, passed, f"{detail} (< 1e-4), {elapsed:.1f} s (< 60 s)")
    assert passed


# -- 6, 7 ------------------------------------------------------------------

def test_criterion_06_zero_error_parity(capsys):
    t0 = time.perf_counter()
    res = run_sweep(SweepSpec("b", (0.0,), 1000, ("mmse", "rslnr"), 6))
    m, r = res.mean("mmse")[0], res.mean("rslnr")[0]
    rel = abs(m - r) / m
    elapsed = time.perf_counter() - t0
    passed = rel < 0.10 and elapsed < 60
    report(capsys, 6, passed, f"MMSE {m:.3f}, rSLNR {r:.3f}, rel diff {rel:.3f} (< 0.10), "
           f"{elapsed:.1f} s (< 60 s)")
    assert passed


def test_criterion_07_robustness_ordering(capsys):
    t0 = time.perf_counter()
    res = run_sweep(SweepSpec("b", (0.1,), 1000, ("mmse", "rslnr"), 7))
    d = res.records["rslnr"][0] - res.records["mmse"][0]
    se = d.std(ddof=1) / np.sqrt(d.size)
    z = d.mean() / se
    elapsed = time.perf_counter() - t0
    passed = z >= 3 and elapsed < 60
    report(capsys, 7, passed, f"MMSE {res.mean('mmse')[0]:.3f}, rSLNR {res.mean('rslnr')[0]:.3f}, "
           f"paired margin {z:.1f} SE (>= 3), {elapsed:.1f} s (< 60 s)")
    assert passed


# -- 8 ---------------------------------------------------------------------

def test_criterion_08_beam_widening(capsys):
    t0 = time.perf_counter()
    cfg = ScenarioConfig(num_antennas=16, num_users=1, mean_user_distance=0.0, fading_std=0.0)
    grid = np.deg2rad(np.linspace(60, 120, 24001))
    r = sample_realization(cfg, np.random.default_rng(8))
    widths = []
    for B in (0.0, 0.025, 0.05, 0.1):
        W = rslnr_from_realization(r, B, cfg)
        widths.append(np.rad2deg(half_power_beamwidth(beam_pattern(W, cfg, grid)[0], grid)))
    monotone = all(b >= a for a, b in zip(widths, widths[1:]))
    elapsed = time.perf_counter() - t0
    passed = monotone and elapsed < 10
    report(capsys, 8, passed, "HPBW deg " + ", ".join(f"{w:.3f}" for w in widths)
           + f" non-decreasing: {monotone}, {elapsed:.2f} s (< 10 s)")
    assert passed


# -- 9, 10 -----------------------------------------------------------------

@pytest.fixture(scope="session")
def trained_policies(tmp_path_factory):
    """SAC policies on the tiny scenario, keyed by (seed, train error bound)."""
    root = tmp_path_factory.mktemp("policies")
    cache = {}

    def get(seed: int, B: float):
        if (seed, B) not in cache:
            cfg = TINY_SAC.replace(total_steps=TRAIN_STEPS, train_error_bound=B)
            cache[(seed, B)] = run_training(get_scenario("tiny"), cfg, seed,
                                            root / f"s{seed}_B{B}", eval_every=50_000,
                                            eval_samples=200, eval_seed=10_000 + seed)
        return cache[(seed, B)]

    return get


def random_precoder_rates(H, cfg, rng):
    """Uniformly random directions on the power sphere (isotropic complex Gaussian)."""
    n = H.shape[0]
    W = rng.normal(size=(n, cfg.num_antennas, cfg.num_users)) + 1j * rng.normal(
        size=(n, cfg.num_antennas, cfg.num_users))
    W *= np.sqrt(cfg.transmit_power) / np.linalg.norm(W, axis=(1, 2), keepdims=True)
    return sum_rate_values(H, W, cfg.noise_power)


def test_criterion_09_training_smoke(capsys, trained_policies):
    cfg = get_scenario("tiny", error_bound=0.0)
    lines, passes = [], 0
    for seed in SEEDS:
        t0 = time.perf_counter()
        result = trained_policies(seed, 0.0)
        H, H_est = sample_channel_batch(cfg, np.random.default_rng(10_000 + seed), 200)
        sac = result.learner.evaluate(H, H_est)
        mmse = np.array([sum_rate_values(h, mmse_precoder(e, cfg.transmit_power,
                                                          cfg.noise_power).W, cfg.noise_power)
                         for h, e in zip(H, H_est)])
        rand = random_precoder_rates(H, cfg, np.random.default_rng(20_000 + seed))
        at_50k = dict(result.evaluations)[50_000]
        smoke = at_50k - rand.mean() >= 3 * rand.std(ddof=1) / np.sqrt(rand.size)
        ok_mmse = sac.mean() >= 0.8 * mmse.mean()
        ok_rand = sac.mean() >= 5 * rand.mean()
        passes += ok_mmse and ok_rand
        lines.append(f"seed {seed}: SAC {sac.mean():.3f} vs 0.8*MMSE {0.8 * mmse.mean():.3f} "
                     f"[{'ok' if ok_mmse else 'no'}], vs 5*random {5 * rand.mean():.3f} "
                     f"[{'ok' if ok_rand else 'no'}], 50k-step eval {at_50k:.3f} "
                     f"{'>' if smoke else 'not >'} random+3SE, "
                     f"{time.perf_counter() - t0:.0f} s")
    passed = passes >= 2
    report(capsys, 9, passed, f"{passes}/3 seeds pass; " + "; ".join(lines))
    assert passed


def test_criterion_10_robust_training_trend(capsys, trained_policies):
    cfg = get_scenario("tiny", error_bound=0.1)
    lines, passes = [], 0
    for seed in SEEDS:
        plain = trained_policies(seed, 0.0).learner
        robust = trained_policies(seed, 0.05).learner
        H, H_est = sample_channel_batch(cfg, np.random.default_rng(30_000 + seed), 1000)
        d = robust.evaluate(H, H_est) - plain.evaluate(H, H_est)
        se = d.std(ddof=1) / np.sqrt(d.size)
        ok = d.mean() >= se
        passes += ok
        lines.append(f"triple {seed}: diff {d.mean():+.3f} ({d.mean() / se:+.1f} SE)")
    passed = passes >= 2
    report(capsys, 10, passed, f"{passes}/3 triples with margin >= 1 SE; " + "; ".join(lines))
    assert passed


# -- 11 --------------------------------------------------------------------

def test_criterion_11_determinism(capsys, tmp_path):
    commands = {
        "train": ["train", "--scenario", "tiny", "--steps", "4000", "--eval-every", "2000",
                  "--eval-samples", "50", "--seed", "11"],
        "sweep": ["sweep", "--scenario", "a", "--error-bounds", "0,0.05,0.1", "--iters", "20",
                  "--seed", "11"],
        "beampattern": ["beampattern", "--scenario", "b", "--error-bound", "0.05", "--seed",
                        "11"],
    }
    mismatches = []
    for name, argv in commands.items():
        for run in ("a", "b"):
            assert main(argv + ["--out", str(tmp_path / name / run)]) == 0
        for f in sorted((tmp_path / name / "a").iterdir()):
            if f.read_bytes() != (tmp_path / name / "b" / f.name).read_bytes():
                mismatches.append(f"{name}/{f.name}")
    ckpt = tmp_path / "train" / "a" / "final.ckpt"
    swept = []
    for run in ("a", "b"):
        assert main(["sweep", "--scenario", "tiny", "--error-bounds", "0,0.1", "--iters", "20",
                     "--precoders", "mmse", "rslnr", str(ckpt), "--out",
                     str(tmp_path / "sac_sweep" / run)]) == 0
        assert main(["calibrate", "--scenario", "tiny", "--seed", "11", "--out",
                     str(tmp_path / f"cal_{run}.ckpt")]) == 0
        swept.append((tmp_path / "sac_sweep" / run / "sweep_records.csv").read_bytes())
    if swept[0] != swept[1]:
        mismatches.append("sac_sweep/sweep_records.csv")
    if (tmp_path / "cal_a.ckpt").read_bytes() != (tmp_path / "cal_b.ckpt").read_bytes():
        mismatches.append("calibrate")
    passed = not mismatches
    report(capsys, 11, passed, "train/sweep/beampattern/calibrate outputs bit-identical on rerun"
           if passed else f"differing outputs: {mismatches}")
    assert passed
