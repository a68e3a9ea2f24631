import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from leoprecode.channel import sample_realization, steering_vector
from leoprecode.config import ScenarioConfig, get_scenario
from leoprecode.errors import EigenFailure, NormalizationOfZero
from leoprecode.metrics import beam_pattern, half_power_beamwidth, sum_rate
from leoprecode.mmse import mmse_precoder
from leoprecode.rslnr import (characteristic_uniform, dominant_eigenpair, rslnr_from_realization,
                              rslnr_precoder, steering_autocorrelation)

P, NOISE = 100.0, 6e-13


def random_channel(seed, K=3, N=8, scale=1e-7):
    rng = np.random.default_rng(seed)
    return scale * (rng.normal(size=(K, N)) + 1j * rng.normal(size=(K, N)))


class TestMmse:
    def test_scalar_case(self):
        c = np.array([[3e-7 - 4e-7j]])
        W = mmse_precoder(c, P, NOISE).W
        np.testing.assert_allclose(W[0, 0], np.sqrt(P) * np.conj(c[0, 0]) / abs(c[0, 0]),
                                   rtol=1e-12)

    def test_zero_channel_raises(self):
        with pytest.raises(NormalizationOfZero):
            mmse_precoder(np.zeros((2, 4), dtype=complex), P, NOISE)

    def test_orthogonal_rows_against_linear_solve(self):
        h1 = np.array([1, 1j, 0, 0]) * 1e-7
        h2 = np.array([0, 0, 1, -1]) * 1e-7
        H = np.stack([h1, h2])
        W = mmse_precoder(H, P, NOISE).W
        # brute force: explicit dense solve of the regularized system
        A = H.conj().T @ H + NOISE * 2 / P * np.eye(4)
        Wp = np.linalg.solve(A, H.conj().T)
        Wp *= np.sqrt(P / np.trace(Wp.conj().T @ Wp).real)
        np.testing.assert_allclose(W, Wp, rtol=1e-10, atol=1e-14)
        for k, h in enumerate(H):
            cos = abs(np.vdot(h.conj(), W[:, k])) / (np.linalg.norm(h) * np.linalg.norm(W[:, k]))
            assert cos == pytest.approx(1.0, abs=1e-12)
        np.testing.assert_allclose(np.sum(np.abs(W) ** 2, axis=0), [P / 2, P / 2], rtol=1e-12)

    @settings(max_examples=40)
    @given(st.integers(0, 10_000))
    def test_full_power(self, seed):
        W = mmse_precoder(random_channel(seed), P, NOISE)
        assert W.total_power == pytest.approx(P, rel=1e-9)

    def test_user_permutation(self):
        H = random_channel(1)
        perm = [2, 0, 1]
        np.testing.assert_allclose(mmse_precoder(H[perm], P, NOISE).W,
                                   mmse_precoder(H, P, NOISE).W[:, perm], rtol=1e-10, atol=1e-14)

    def test_global_phase_leaves_rate(self):
        cfg = ScenarioConfig(error_bound=0.05)
        r = sample_realization(cfg, np.random.default_rng(3))
        W1 = mmse_precoder(r.estimated_channel, P, NOISE)
        W2 = mmse_precoder(np.exp(1.234j) * r.estimated_channel, P, NOISE)
        assert sum_rate(r.true_channel, W2, NOISE).sum_rate == pytest.approx(
            sum_rate(r.true_channel, W1, NOISE).sum_rate, rel=1e-12)

    @pytest.mark.parametrize("seed", range(5))
    def test_matched_filter_limit(self, seed):
        H = random_channel(seed)
        W = mmse_precoder(H, P, 1e6).W
        for k in range(H.shape[0]):
            mf = H[k].conj()
            cos = abs(np.vdot(mf, W[:, k])) / (np.linalg.norm(mf) * np.linalg.norm(W[:, k]))
            assert cos > 0.999


class TestCharacteristic:
    def test_at_zero(self):
        assert characteristic_uniform(0.0, 0.05) == 1.0

    def test_zero_bound(self):
        np.testing.assert_array_equal(characteristic_uniform(np.linspace(-100, 100, 9), 0.0), 1.0)

    def test_first_null_monte_carlo(self):
        B = 0.05
        t = np.pi / B
        assert characteristic_uniform(t, B) == pytest.approx(0.0, abs=1e-15)
        d = np.random.default_rng(0).uniform(-B, B, 1_000_000)
        assert abs(np.mean(np.exp(1j * t * d))) < 3e-3

    def test_matches_closed_form(self):
        t = np.linspace(0.1, 200, 50)
        np.testing.assert_allclose(characteristic_uniform(t, 0.03), np.sin(0.03 * t) / (0.03 * t),
                                   rtol=1e-12)


class TestAutocorrelation:
    cfg = ScenarioConfig(num_antennas=10)

    def test_zero_bound_is_rank_one_outer_product(self):
        phi = 0.123
        R = steering_autocorrelation(phi, 0.0, self.cfg).R
        v = steering_vector(phi, self.cfg)
        np.testing.assert_allclose(R, np.outer(v.conj(), v), atol=1e-12)
        np.testing.assert_allclose(np.abs(R), 1.0, rtol=1e-12)

    @pytest.mark.parametrize("B", [0.0, 0.02, 0.1])
    def test_invariants(self, B):
        R = steering_autocorrelation(-0.3, B, self.cfg).R
        np.testing.assert_allclose(np.diag(R), 1.0)
        np.testing.assert_allclose(R, R.conj().T, atol=1e-12)
        assert np.linalg.eigvalsh(R).min() > -1e-10

    def test_corner_entry_value(self):
        R = steering_autocorrelation(0.0, 0.05, self.cfg).R
        # t = 2 pi (d_a / lambda) * 9 = 27 pi, value sin(27 pi B) / (27 pi B)
        x = 27 * np.pi * 0.05
        assert R[0, 9].real == pytest.approx(np.sin(x) / x, rel=1e-12)
        assert R[0, 9].real == pytest.approx(-0.21009, abs=1e-5)
        assert R[0, 9].imag == 0.0
        d = np.random.default_rng(2).uniform(-0.05, 0.05, 1_000_000)
        assert abs(np.mean(np.exp(1j * 27 * np.pi * d)) - R[0, 9]) < 3e-3

    def test_monte_carlo_outer_products(self):
        phi_hat, B = 0.07, 0.05
        d = np.random.default_rng(1).uniform(-B, B, 200_000)
        V = steering_vector(phi_hat - d, self.cfg)  # rows: true steering vectors
        mc = V.conj().T @ V / len(d)
        R = steering_autocorrelation(phi_hat, B, self.cfg).R
        # 2e5 draws: MC standard error per entry is below 1/sqrt(2e5) ~ 2.2e-3
        assert np.max(np.abs(mc - R)) < 1e-2

    def test_inverse_path_loss(self):
        ac = steering_autocorrelation(0.0, 0.0, self.cfg, path_loss=4e13)
        assert ac.inverse_path_loss == pytest.approx(2.5e-14)


class TestRslnr:
    def test_single_user_matched_beam(self):
        cfg = ScenarioConfig(num_antennas=10, num_users=1)
        phi = 0.2
        for method in ("power", "dense"):
            W = rslnr_precoder([(phi, 3e13)], 0.0, cfg, method).W
            gain = abs(steering_vector(phi, cfg) @ W[:, 0])
            assert gain == pytest.approx(np.sqrt(cfg.num_antennas * P), rel=1e-9)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 10_000), st.floats(0.0, 0.15))
    def test_equal_column_power(self, seed, B):
        cfg = get_scenario("b", error_bound=B)
        r = sample_realization(cfg, np.random.default_rng(seed))
        W = rslnr_from_realization(r, B, cfg)
        np.testing.assert_allclose(W.column_powers(), P / 3, rtol=1e-9)
        assert W.total_power == pytest.approx(P, rel=1e-9)

    @pytest.mark.parametrize("seed", range(10))
    def test_power_iteration_matches_dense(self, seed):
        rng = np.random.default_rng(seed)
        B = rng.uniform(0, 0.15)
        cfg = get_scenario("b", error_bound=B)
        r = sample_realization(cfg, rng)
        a = rslnr_from_realization(r, B, cfg, "power").W
        b = rslnr_from_realization(r, B, cfg, "dense").W
        cos = np.abs(np.sum(a.conj() * b, axis=0)) / (P / 3)
        assert np.all(cos > 1 - 1e-8)

    def test_tiny_zero_error_close_to_mmse(self):
        cfg = ScenarioConfig(num_antennas=4, num_users=2, mean_user_distance=200e3)
        rates_m, rates_r = [], []
        for i in range(50):
            r = sample_realization(cfg, np.random.default_rng([3, i]))
            rates_m.append(sum_rate(r.true_channel, mmse_precoder(r.estimated_channel, P, NOISE),
                                    NOISE).sum_rate)
            rates_r.append(sum_rate(r.true_channel, rslnr_from_realization(r, 0.0, cfg),
                                    NOISE).sum_rate)
        assert abs(np.mean(rates_r) - np.mean(rates_m)) / np.mean(rates_m) < 0.10

    @pytest.mark.parametrize("seed", range(3))
    def test_joint_rescaling_invariance(self, seed):
        # scaling every channel gain 1/L_k and the noise power by one factor
        # leaves the whitened eigenproblem and all SINRs unchanged
        cfg = get_scenario("a", error_bound=0.05)
        r = sample_realization(cfg, np.random.default_rng(seed))
        c = 7.3
        cfg2 = cfg.replace(noise_power=cfg.noise_power * c)
        est = list(zip(r.estimated_space_angles, r.path_losses))
        est2 = [(phi, L / c) for phi, L in est]
        W1 = rslnr_precoder(est, 0.05, cfg)
        W2 = rslnr_precoder(est2, 0.05, cfg2)
        rate1 = sum_rate(r.true_channel, W1, cfg.noise_power).sum_rate
        rate2 = sum_rate(np.sqrt(c) * r.true_channel, W2, cfg2.noise_power).sum_rate
        assert rate2 == pytest.approx(rate1, rel=1e-9)

    def test_beams_peak_at_estimates_for_small_error(self):
        cfg = get_scenario("b", jitter=False, fading_std=0.0)
        grid_c = np.linspace(-0.4, 0.4, 801)
        cell = grid_c[1] - grid_c[0]
        phis = [-0.1644, 0.0, 0.1644]
        W = rslnr_precoder([(p, 2.6e13) for p in phis], 1e-4, cfg)
        g = beam_pattern(W, cfg, np.arccos(grid_c))
        for k, phi in enumerate(phis):
            assert abs(grid_c[np.argmax(g[k])] - phi) <= cell

    def test_single_user_beam_widens_with_error_bound(self):
        cfg = ScenarioConfig(num_antennas=16, num_users=1)
        grid = np.linspace(np.deg2rad(60), np.deg2rad(120), 6001)
        widths = []
        for B in (0.0, 0.025, 0.05, 0.1):
            W = rslnr_precoder([(0.0, 2.5e13)], B, cfg)
            widths.append(half_power_beamwidth(beam_pattern(W, cfg, grid)[0], grid))
        assert all(b >= a for a, b in zip(widths, widths[1:]))
        assert widths[-1] > widths[0]

    def test_eigen_failure_surfaces(self):
        rng = np.random.default_rng(0)
        A = rng.normal(size=(6, 6))
        M = A @ A.T
        with pytest.raises(EigenFailure):
            dominant_eigenpair(M, tol=0.0, max_iter=5)

    def test_dominant_eigenpair_real_symmetric(self):
        rng = np.random.default_rng(1)
        A = rng.normal(size=(6, 6))
        M = A @ A.T
        lam, v = dominant_eigenpair(M)
        w, V = np.linalg.eigh(M)
        assert lam == pytest.approx(w[-1], rel=1e-10)
        assert abs(np.vdot(V[:, -1], v)) == pytest.approx(1.0, abs=1e-12)
        i = np.argmax(np.abs(v))
        assert v[i].imag == 0.0 and v[i].real > 0
