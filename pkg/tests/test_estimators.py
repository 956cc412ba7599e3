"""Least-squares fitters: exactness, gradient correctness, recovery rates."""

import numpy as np
import pytest

import samplex as sx
from samplex import FitOptions, ModelSpec
from samplex.estimators import rnn_loss_and_grad, cw_loss_and_grad


class TestOls:
    def test_identity_design(self, rng):
        y = rng.standard_normal(5)
        np.testing.assert_allclose(sx.ols(np.eye(5), y), y, atol=1e-12)

    def test_constant_design_yields_mean(self):
        theta = sx.ols(np.ones((3, 1)), np.array([1.0, 2.0, 3.0]))
        np.testing.assert_allclose(theta, [2.0])

    def test_exact_interpolation(self, rng):
        Z = rng.standard_normal((40, 7))
        theta_star = rng.standard_normal(7)
        theta = sx.ols(Z, Z @ theta_star)
        np.testing.assert_allclose(theta, theta_star, rtol=1e-8)

    def test_rank_deficient_returns_min_norm(self, rng):
        base = rng.standard_normal((10, 3))
        Z = np.hstack([base, base[:, :1]])  # duplicated column
        y = rng.standard_normal(10)
        theta = sx.ols(Z, y)
        # minimum-norm solution is orthogonal to the null space (e1 - e4 here)
        null = np.array([1.0, 0.0, 0.0, -1.0])
        assert abs(theta @ null) <= 1e-10

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            sx.ols(np.array([[np.nan]]), np.array([1.0]))
        with pytest.raises(ValueError):
            sx.ols(np.eye(2), np.array([1.0, np.inf]))


class TestFitCA:
    def test_noiseless_recovery(self):
        spec = ModelSpec("ca", d=16, m=4, s=2)
        truth = sx.sample_truth(spec, 0)
        ds = sx.gen_dataset(spec, truth, 64, 0.0, 1)
        res = sx.fit_ca(ds)
        np.testing.assert_allclose(
            res.expanded_hat, sx.expand_params(truth, spec), atol=1e-6
        )
        assert res.converged

    def test_interpolation_regime_min_norm(self):
        spec = ModelSpec("ca", d=32, m=16, s=1)
        truth = sx.sample_truth(spec, 2)
        ds = sx.gen_dataset(spec, truth, 8, 1.0, 3)  # n < m
        res = sx.fit_ca(ds)
        assert res.train_loss <= 1e-16 * max(1.0, float(np.max(ds.labels**2)))

    def test_wrong_kind_rejected(self):
        spec = ModelSpec("cw", d=8, m=2, s=2)
        truth = sx.sample_truth(spec, 0)
        ds = sx.gen_dataset(spec, truth, 10, 1.0, 0)
        with pytest.raises(ValueError):
            sx.fit_ca(ds)

    def test_noisy_large_sample_error_under_ceiling(self, fig2_m8):
        # 20-seed reference at sigma=1, n=2^13, d=64, m=8: median ~0.033
        result, _ = fig2_m8
        assert result.median_error(estimator="ca", n=8192) <= 0.3

    def test_perturbations_never_improve(self, rng):
        spec = ModelSpec("ca", d=16, m=4, s=4)
        truth = sx.sample_truth(spec, 4)
        ds = sx.gen_dataset(spec, truth, 100, 1.0, 5)
        res = sx.fit_ca(ds)
        Phi = sx.ca_features(ds.inputs, spec)
        base = float(np.mean((Phi @ res.params_hat.w - ds.labels) ** 2))
        for _ in range(20):
            delta = rng.standard_normal(4)
            delta *= 1e-3 / np.linalg.norm(delta)
            for sign in (1.0, -1.0):
                loss = float(np.mean((Phi @ (res.params_hat.w + sign * delta) - ds.labels) ** 2))
                assert loss >= base - 1e-12


class TestFitFNN:
    def test_equals_ols_exactly(self):
        spec = ModelSpec("ca", d=8, m=2, s=1)
        truth = sx.sample_truth(spec, 6)
        ds = sx.gen_dataset(spec, truth, 50, 1.0, 7)
        res = sx.fit_fnn(ds)
        np.testing.assert_array_equal(res.expanded_hat, sx.ols(ds.features(), ds.labels))

    def test_noiseless_zero_error(self):
        spec = ModelSpec("fnn", d=12)
        truth = sx.sample_truth(spec, 8)
        ds = sx.gen_dataset(spec, truth, 48, 0.0, 9)
        res = sx.fit_fnn(ds)
        assert sx.prediction_error(res.expanded_hat, truth.theta) <= 1e-6

    def test_interpolates_when_underdetermined(self):
        spec = ModelSpec("fnn", d=40)
        truth = sx.sample_truth(spec, 10)
        ds = sx.gen_dataset(spec, truth, 12, 1.0, 11)
        res = sx.fit_fnn(ds)
        assert res.train_loss <= 1e-16 * max(1.0, float(np.max(ds.labels**2)))

    def test_perturbations_never_improve(self, rng):
        spec = ModelSpec("fnn", d=6)
        truth = sx.sample_truth(spec, 12)
        ds = sx.gen_dataset(spec, truth, 60, 1.0, 13)
        res = sx.fit_fnn(ds)
        Z = ds.features()
        base = float(np.mean((Z @ res.expanded_hat - ds.labels) ** 2))
        for _ in range(20):
            delta = rng.standard_normal(6)
            delta *= 1e-3 / np.linalg.norm(delta)
            loss = float(np.mean((Z @ (res.expanded_hat + delta) - ds.labels) ** 2))
            assert loss >= base - 1e-12


class TestFitCW:
    def test_single_position_truth_recovered(self):
        spec = ModelSpec("cw", d=16, m=4, s=2)
        rng = np.random.default_rng(0)
        a = np.zeros(spec.r_conv)
        a[0] = 1.0
        truth = sx.CWParams(w=rng.standard_normal(4), a=a)
        ds = sx.gen_dataset(spec, truth, 80, 0.0, 14)
        res = sx.fit_cw(ds)
        assert res.train_loss <= 1e-8
        assert res.converged

    def test_noiseless_generic_success_rate(self):
        spec = ModelSpec("cw", d=16, m=4, s=2)
        n = 4 * (spec.m + spec.r_conv)
        wins = 0
        for seed in range(20):
            truth = sx.sample_truth(spec, sx.derive_seed(15, seed))
            ds = sx.gen_dataset(spec, truth, n, 0.0, sx.derive_seed(16, seed))
            res = sx.fit_cw(ds, FitOptions(max_iters=300, tol=1e-13, restarts=5, seed=seed))
            wins += res.train_loss <= 1e-8
        assert wins >= 18

    def test_alternating_loss_monotone(self):
        spec = ModelSpec("cw", d=12, m=4, s=1)
        truth = sx.sample_truth(spec, 17)
        ds = sx.gen_dataset(spec, truth, 60, 1.0, 18)
        res = sx.fit_cw(ds, FitOptions(max_iters=50, tol=1e-14, restarts=1))
        history = res.loss_history
        assert history is not None and len(history) >= 4
        diffs = np.diff(history)
        assert np.all(diffs <= 1e-12 * (1.0 + history[:-1]))

    def test_gradient_matches_finite_differences(self, rng):
        spec = ModelSpec("cw", d=8, m=4, s=2)
        X = rng.standard_normal((12, 8))
        y = rng.standard_normal(12)
        h = 1e-5
        for _ in range(25):
            w = rng.standard_normal(4)
            a = rng.standard_normal(spec.r_conv)
            _, gw, ga = cw_loss_and_grad(w, a, X, y, spec)
            fd = np.empty(4 + spec.r_conv)
            for i in range(4):
                e = np.zeros(4); e[i] = h
                lp, *_ = cw_loss_and_grad(w + e, a, X, y, spec)
                lm, *_ = cw_loss_and_grad(w - e, a, X, y, spec)
                fd[i] = (lp - lm) / (2 * h)
            for j in range(spec.r_conv):
                e = np.zeros(spec.r_conv); e[j] = h
                lp, *_ = cw_loss_and_grad(w, a + e, X, y, spec)
                lm, *_ = cw_loss_and_grad(w, a - e, X, y, spec)
                fd[4 + j] = (lp - lm) / (2 * h)
            grad = np.concatenate([gw, ga])
            assert np.linalg.norm(grad - fd) <= 1e-5 * max(1.0, np.linalg.norm(fd))


class TestFitRNN:
    def test_single_step_matches_ols(self):
        spec = ModelSpec("rnn", d=6, r=3, L=1)
        truth = sx.sample_truth(spec, 3)
        ds = sx.gen_dataset(spec, truth, 200, 0.5, 4)
        res = sx.fit_rnn(ds, FitOptions(max_iters=4000, tol=1e-14, restarts=1))
        theta = sx.ols(ds.features(), ds.labels)
        ols_loss = float(np.mean((ds.features() @ theta - ds.labels) ** 2))
        assert res.train_loss <= ols_loss + 1e-6

    def test_noiseless_majority_reaches_tiny_loss(self):
        spec = ModelSpec("rnn", d=10, r=2, L=5)
        wins = 0
        for seed in range(20):
            truth = sx.sample_truth(spec, sx.derive_seed(100, seed))
            ds = sx.gen_dataset(spec, truth, 500, 0.0, sx.derive_seed(200, seed))
            res = sx.fit_rnn(ds, FitOptions(
                max_iters=3000, tol=1e-14, restarts=3, seed=seed, learning_rate=0.05))
            wins += res.train_loss <= 1e-6
        assert wins >= 11  # measured 17/20 with these options

    def test_gradient_matches_finite_differences(self, rng):
        spec = ModelSpec("rnn", d=4, r=2, L=5)
        X = rng.standard_normal((10, 5, 4))
        y = rng.standard_normal(10)
        h = 1e-5
        for _ in range(25):
            A = rng.standard_normal((2, 2)) * 0.5
            B = rng.standard_normal((2, 4))
            _, GA, GB = rnn_loss_and_grad(A, B, X, y)
            fd_A = np.zeros_like(A)
            for i in range(2):
                for j in range(2):
                    E = np.zeros_like(A); E[i, j] = h
                    lp, *_ = rnn_loss_and_grad(A + E, B, X, y)
                    lm, *_ = rnn_loss_and_grad(A - E, B, X, y)
                    fd_A[i, j] = (lp - lm) / (2 * h)
            fd_B = np.zeros_like(B)
            for i in range(2):
                for j in range(4):
                    E = np.zeros_like(B); E[i, j] = h
                    lp, *_ = rnn_loss_and_grad(A, B + E, X, y)
                    lm, *_ = rnn_loss_and_grad(A, B - E, X, y)
                    fd_B[i, j] = (lp - lm) / (2 * h)
            grad = np.concatenate([GA.ravel(), GB.ravel()])
            fd = np.concatenate([fd_A.ravel(), fd_B.ravel()])
            assert np.linalg.norm(grad - fd) <= 1e-5 * max(1.0, np.linalg.norm(fd))

    def test_plain_descent_variant_improves_loss(self):
        spec = ModelSpec("rnn", d=4, r=2, L=3)
        truth = sx.sample_truth(spec, 21)
        ds = sx.gen_dataset(spec, truth, 100, 0.5, 22)
        res = sx.fit_rnn(ds, FitOptions(max_iters=200, tol=1e-12, restarts=1, method="gd"))
        base = float(np.mean(ds.labels**2))
        assert res.train_loss < base
        assert np.all(np.isfinite(res.expanded_hat))


class TestPredictionError:
    def test_zero_for_identical(self, rng):
        theta = rng.standard_normal(10)
        assert sx.prediction_error(theta, theta) == 0.0

    def test_unit_coordinate(self):
        theta = np.zeros(5)
        other = theta.copy()
        other[0] = 1.0
        assert sx.prediction_error(other, theta) == 1.0

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            sx.prediction_error(np.zeros(3), np.zeros(4))

    def test_matches_monte_carlo_within_3_se(self, rng):
        n_mc = 100_000
        for k in range(12):
            kind = ("ca", "cw", "rnn")[k % 3]
            if kind == "ca":
                spec = ModelSpec("ca", d=12, m=4, s=2)
            elif kind == "cw":
                spec = ModelSpec("cw", d=12, m=4, s=4)
            else:
                spec = ModelSpec("rnn", d=6, r=2, L=5)
            truth = sx.sample_truth(spec, sx.derive_seed(30, k))
            other = sx.sample_truth(spec, sx.derive_seed(31, k))
            closed = sx.prediction_error(
                sx.expand_params(other, spec), sx.expand_params(truth, spec)
            )
            mc = sx.mc_prediction_error(spec, truth, other, n_mc, sx.derive_seed(32, k))
            # standard error of the mean-square estimate, propagated through sqrt
            X = (sx.rng_from(sx.derive_seed(32, k)).standard_normal(
                (n_mc, spec.L, spec.d)) if spec.input_is_sequence
                else sx.rng_from(sx.derive_seed(32, k)).standard_normal((n_mc, spec.d)))
            diff = (sx.batch_forward(truth, X, spec) - sx.batch_forward(other, X, spec)) ** 2
            se = diff.std() / np.sqrt(n_mc) / (2 * mc)
            assert abs(closed - mc) <= 3 * se

    def test_mc_deterministic_and_zero_at_truth(self):
        spec = ModelSpec("rnn", d=4, r=2, L=3)
        truth = sx.sample_truth(spec, 33)
        assert sx.mc_prediction_error(spec, truth, truth, 100, 0) == 0.0
        other = sx.sample_truth(spec, 34)
        a = sx.mc_prediction_error(spec, truth, other, 500, 5)
        b = sx.mc_prediction_error(spec, truth, other, 500, 5)
        assert a == b

    def test_mc_converges_to_closed_form(self):
        spec = ModelSpec("ca", d=16, m=4, s=2)
        truth = sx.sample_truth(spec, 35)
        other = sx.sample_truth(spec, 36)
        closed = sx.prediction_error(
            sx.expand_params(other, spec), sx.expand_params(truth, spec)
        )
        mc = sx.mc_prediction_error(spec, truth, other, 100_000, 37)
        assert abs(mc - closed) / closed <= 0.02
