import itertools

import numpy as np
import pytest
from numpy.testing import assert_allclose

from gmud import (
    SINR_CAP,
    GmudBeamParams,
    GmudFeedback,
    GridSpec,
    antenna_selection,
    beam_from_feedback,
    expected_gamma,
    gen_channels,
    gmud_min_sinr,
    optimize_gmud,
    reg_inv,
    svd2x2,
)


def crand(rng, shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) * np.sqrt(0.5)


def perfect_report(svd):
    v1 = svd.v[:, 0].copy()
    raw = np.array([v1[0].real, v1[0].imag, v1[1].real, v1[1].imag, svd.lambda1, svd.lambda2])
    return GmudFeedback(raw, v1, svd.lambda1, svd.lambda2)


def random_reports(rng):
    cs = gen_channels(rng)
    return [perfect_report(s) for s in cs.svds]


class TestRegInv:
    def test_zero_noise_identity(self):
        assert_allclose(reg_inv(np.eye(2), 0.0).g, np.eye(2))

    def test_scalar_regularization(self):
        # K*sigma^2 = 0.2, so G = I / 1.2
        assert_allclose(reg_inv(np.eye(2), 0.1).g, np.eye(2) / 1.2, rtol=1e-14)

    def test_zero_forcing_residual(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            h = crand(rng, (2, 2))
            if abs(np.linalg.det(h)) < 0.1:
                continue
            assert np.linalg.norm(h @ reg_inv(h, 0.0).g - np.eye(2)) <= 1e-9

    def test_negative_noise_rejected(self):
        with pytest.raises(ValueError):
            reg_inv(np.eye(2), -1.0)


class TestExpectedGamma:
    def test_column_norms(self):
        g = np.array([[1.0, 0.0], [1.0, 2.0]])
        assert expected_gamma(g) == pytest.approx(6.0, rel=1e-12)


class TestAntennaSelection:
    def brute_force(self, channels, noise_var):
        snr = np.inf if noise_var == 0 else 1.0 / noise_var
        best_combo, best_score = None, -1.0
        for combo in itertools.product(*[range(h.shape[0]) for h in channels]):
            h_hat = np.stack([channels[k][row] for k, row in enumerate(combo)])
            g = reg_inv(h_hat, noise_var).g
            e = h_hat @ g
            gbar = expected_gamma(g)
            noise_term = 0.0 if snr == np.inf else gbar / snr
            score = min(
                min(abs(e[m, m]) ** 2 / (sum(abs(e[m, n]) ** 2 for n in range(2) if n != m) + noise_term), SINR_CAP)
                for m in range(2)
            )
            if score > best_score:
                best_combo, best_score = combo, score
        return best_combo, best_score

    def test_single_row_degenerate(self):
        rng = np.random.default_rng(1)
        channels = [crand(rng, (1, 2)), crand(rng, (1, 2))]
        combo, pre, report = antenna_selection(channels, 0.01)
        assert combo == (0, 0)

    def test_orthogonal_rows_selected(self):
        # user 1 row 2 and user 2 row 1 are orthogonal units; other rows aliased
        aliased = np.array([1.0, 1.0]) / np.sqrt(2)
        h1 = np.stack([aliased, np.array([1.0, 0.0])])
        h2 = np.stack([np.array([0.0, 1.0]), aliased])
        combo, pre, report = antenna_selection([h1, h2], 0.01)
        assert combo == (1, 0)

    def test_matches_brute_force(self):
        rng = np.random.default_rng(2)
        for _ in range(200):
            channels = [crand(rng, (2, 2)), crand(rng, (2, 2))]
            noise = float(rng.uniform(1e-4, 0.5))
            combo, pre, report = antenna_selection(channels, noise)
            expected_combo, expected_score = self.brute_force(channels, noise)
            assert combo == expected_combo
            assert report.min_sinr == pytest.approx(expected_score, rel=1e-12)

    def test_candidate_order_invariance(self):
        rng = np.random.default_rng(3)
        channels = [crand(rng, (2, 2)), crand(rng, (2, 2))]
        combo1, _, rep1 = antenna_selection(channels, 0.05)
        combo2, _, rep2 = antenna_selection([c.copy() for c in channels], 0.05)
        assert combo1 == combo2 and rep1.min_sinr == rep2.min_sinr


class TestGmudMinSinr:
    def test_orthogonal_beams(self):
        # beams along e1 and e2, alpha = beta = 1/sqrt(2): SINR_k = r_k^2/(2 sigma^2)
        fb_k = GmudFeedback(np.zeros(6), np.array([1.0, 0.0], dtype=complex), 2.0, 1.0)
        fb_l = GmudFeedback(np.zeros(6), np.array([0.0, 1.0], dtype=complex), 2.0, 1.0)
        params = GmudBeamParams(2.0, 0.0, 2.0, 0.0, alpha=np.sqrt(0.5), beta=np.sqrt(0.5))
        rep = gmud_min_sinr(params, fb_k, fb_l, 0.1)
        assert rep.per_user[0] == pytest.approx(4.0 / 0.2, rel=1e-12)
        assert rep.gamma_bar == pytest.approx(1.0, abs=1e-12)

    def test_identical_beams_interference_limited(self):
        v = np.array([1.0, 1.0j]) / np.sqrt(2)
        fb = GmudFeedback(np.zeros(6), v, 2.0, 1.0)
        params = GmudBeamParams(2.0, 0.0, 2.0, 0.0, alpha=np.sqrt(0.5), beta=np.sqrt(0.5))
        rep = gmud_min_sinr(params, fb, fb, 1e-15)
        assert rep.min_sinr == pytest.approx(1.0, rel=1e-9)

    def test_matches_independent_expression(self):
        rng = np.random.default_rng(4)
        for _ in range(100):
            fb_k, fb_l = random_reports(rng)
            params = GmudBeamParams(
                r_k=float(rng.uniform(fb_k.lambda2, fb_k.lambda1)),
                theta_k=float(rng.uniform(0, 2 * np.pi)),
                r_l=float(rng.uniform(fb_l.lambda2, fb_l.lambda1)),
                theta_l=float(rng.uniform(0, 2 * np.pi)),
                alpha=np.sqrt(0.3),
                beta=np.sqrt(0.7),
            )
            noise = float(rng.uniform(1e-4, 0.5))
            rep = gmud_min_sinr(params, fb_k, fb_l, noise)
            q1k = beam_from_feedback(fb_k.lambda1, fb_k.lambda2, fb_k.v1, params.r_k, params.theta_k)
            q1l = beam_from_feedback(fb_l.lambda1, fb_l.lambda2, fb_l.v1, params.r_l, params.theta_l)
            x = abs(np.vdot(q1k, q1l)) ** 2
            a2, b2 = params.alpha**2, params.beta**2
            sk = a2 * params.r_k**2 / (b2 * params.r_k**2 * x + noise * (a2 + b2))
            sl = b2 * params.r_l**2 / (a2 * params.r_l**2 * x + noise * (a2 + b2))
            assert rep.per_user[0] == pytest.approx(sk, rel=1e-12)
            assert rep.per_user[1] == pytest.approx(sl, rel=1e-12)
            assert rep.min_sinr == min(rep.per_user)

    def test_common_phase_invariance(self):
        # the cost sees the beams only through |q1k^H q1l|^2, which a common
        # phase rotation of both beams leaves untouched
        from gmud.precoding import _beam_inner_abs2, _pair_sinr

        rng = np.random.default_rng(5)
        fb_k, fb_l = random_reports(rng)
        params = GmudBeamParams(
            0.5 * (fb_k.lambda1 + fb_k.lambda2), 1.0,
            0.5 * (fb_l.lambda1 + fb_l.lambda2), 2.0,
            alpha=np.sqrt(0.5), beta=np.sqrt(0.5),
        )
        q1k = beam_from_feedback(fb_k.lambda1, fb_k.lambda2, fb_k.v1, params.r_k, params.theta_k)
        q1l = beam_from_feedback(fb_l.lambda1, fb_l.lambda2, fb_l.v1, params.r_l, params.theta_l)
        rep = gmud_min_sinr(params, fb_k, fb_l, 0.01)
        for delta in (0.7, 2.9, 5.5):
            rot = np.exp(1j * delta)
            x = _beam_inner_abs2(rot * q1k, rot * q1l)
            sk, sl = _pair_sinr(
                params.r_k**2, params.r_l**2, x,
                params.alpha**2, params.beta**2,
                params.alpha**2 + params.beta**2, 0.01,
            )
            assert min(float(sk), float(sl)) == pytest.approx(rep.min_sinr, rel=1e-12)

    def test_saturation_total_order(self):
        fb_k = GmudFeedback(np.zeros(6), np.array([1.0, 0.0], dtype=complex), 2.0, 1.0)
        fb_l = GmudFeedback(np.zeros(6), np.array([0.0, 1.0], dtype=complex), 2.0, 1.0)
        params = GmudBeamParams(2.0, 0.0, 2.0, 0.0, alpha=np.sqrt(0.5), beta=np.sqrt(0.5))
        rep = gmud_min_sinr(params, fb_k, fb_l, 0.0)
        assert rep.min_sinr == SINR_CAP


class TestOptimizeGmud:
    def enumerate_grid(self, fb_k, fb_l, noise, grid):
        rk = np.linspace(fb_k.lambda2, fb_k.lambda1, grid.n_r)
        rl = np.linspace(fb_l.lambda2, fb_l.lambda1, grid.n_r)
        th = np.linspace(0.0, 2 * np.pi, grid.n_theta, endpoint=False)
        a2s = np.concatenate([np.linspace(0.1, 0.9, grid.n_p), [0.0, 1.0]])
        best = -np.inf
        for irk, irl, itk, itl, ia in itertools.product(
            range(grid.n_r), range(grid.n_r), range(grid.n_theta), range(grid.n_theta), range(len(a2s))
        ):
            p = GmudBeamParams(
                float(rk[irk]), float(th[itk]), float(rl[irl]), float(th[itl]),
                alpha=float(np.sqrt(a2s[ia])), beta=float(np.sqrt(1.0 - a2s[ia])),
            )
            best = max(best, gmud_min_sinr(p, fb_k, fb_l, noise).min_sinr)
        return best

    def test_single_point_grid(self):
        rng = np.random.default_rng(6)
        fb_k, fb_l = random_reports(rng)
        pre, params, rep = optimize_gmud(fb_k, fb_l, 0.01, GridSpec(1, 1, 1))
        assert params.r_k == fb_k.lambda2
        assert params.theta_k == 0.0
        assert params.alpha == pytest.approx(np.sqrt(0.1), rel=1e-15)

    def test_exact_grid_maximum(self):
        rng = np.random.default_rng(7)
        grid = GridSpec(n_r=3, n_theta=4, n_p=3)
        for _ in range(5):
            fb_k, fb_l = random_reports(rng)
            noise = float(rng.uniform(1e-3, 0.2))
            _, params, rep = optimize_gmud(fb_k, fb_l, noise, grid)
            assert rep.min_sinr == self.enumerate_grid(fb_k, fb_l, noise, grid)
            # returned params reproduce the returned report bit for bit
            again = gmud_min_sinr(params, fb_k, fb_l, noise)
            assert again.min_sinr == rep.min_sinr
            assert again.per_user == rep.per_user

    def test_dominates_svd_beamforming_point(self):
        rng = np.random.default_rng(8)
        for _ in range(20):
            fb_k, fb_l = random_reports(rng)
            noise = 0.01
            _, _, rep = optimize_gmud(fb_k, fb_l, noise)
            a2s = np.concatenate([np.linspace(0.1, 0.9, 9), [0.0, 1.0]])
            for a2 in a2s:
                p = GmudBeamParams(
                    fb_k.lambda1, 0.0, fb_l.lambda1, 0.0,
                    alpha=float(np.sqrt(a2)), beta=float(np.sqrt(1.0 - a2)),
                )
                assert rep.min_sinr >= gmud_min_sinr(p, fb_k, fb_l, noise).min_sinr

    def test_orthogonal_users_pick_principal_vectors(self):
        # orthogonal principal vectors: the zero-interference point r = lambda1 wins
        fb_k = GmudFeedback(np.zeros(6), np.array([1.0, 0.0], dtype=complex), 2.0, 1.0)
        fb_l = GmudFeedback(np.zeros(6), np.array([0.0, 1.0], dtype=complex), 2.0, 1.0)
        pre, params, rep = optimize_gmud(fb_k, fb_l, 1e-6)
        assert params.r_k == 2.0 and params.r_l == 2.0
        assert params.alpha**2 == pytest.approx(0.5, rel=1e-12)

    def test_g_columns_are_loaded_beams(self):
        rng = np.random.default_rng(9)
        fb_k, fb_l = random_reports(rng)
        pre, params, _ = optimize_gmud(fb_k, fb_l, 0.01)
        assert np.linalg.norm(pre.g[:, 0]) == pytest.approx(params.alpha, abs=1e-12)
        assert np.linalg.norm(pre.g[:, 1]) == pytest.approx(params.beta, abs=1e-12)

    def test_refine_never_worse(self):
        rng = np.random.default_rng(10)
        for _ in range(5):
            fb_k, fb_l = random_reports(rng)
            _, _, base = optimize_gmud(fb_k, fb_l, 0.01, GridSpec(4, 8, 5))
            _, _, refined = optimize_gmud(fb_k, fb_l, 0.01, GridSpec(4, 8, 5, refine=True))
            assert refined.min_sinr >= base.min_sinr

    def test_bad_grid_rejected(self):
        rng = np.random.default_rng(11)
        fb_k, fb_l = random_reports(rng)
        with pytest.raises(ValueError):
            optimize_gmud(fb_k, fb_l, 0.01, GridSpec(0, 4, 3))
