"""Estimation drivers: options, warm start, and the four fit methods."""

import numpy as np
import pytest

import oracles
from bpreg import bias, bpdist, fit, model
from bpreg.exceptions import NonConvergence


def _easy_spec(seed=7, n=80):
    rng = np.random.default_rng(seed)
    X = np.column_stack([np.ones(n), rng.uniform(-1.0, 1.0, n)])
    Z = np.ones((n, 1))
    beta = np.array([0.3, -0.4])
    nu = np.array([0.8])
    mu = np.exp(X @ beta)
    phi = np.exp(Z @ nu)
    y = bpdist.sample_bp(mu, phi, rng)
    return model.ModelSpec(y, X, Z), model.ParamVector(beta, nu)


class TestFitOptions:
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"max_iter": 0},
            {"tol_score": 0.0},
            {"tol_step": -1e-3},
            {"step_halvings": -1},
            {"bootstrap_reps": 0},
            {"method": "newton"},
        ],
    )
    def test_rejects_bad_values(self, kwargs):
        with pytest.raises(ValueError):
            fit.FitOptions(**kwargs)

    def test_defaults(self):
        opts = fit.FitOptions()
        assert opts.method == "mle"
        assert opts.max_iter == 200
        assert opts.seed is None


class TestInitialParams:
    def test_evaluable_start(self):
        for seed in range(5):
            spec, _ = _easy_spec(seed=seed, n=40)
            start = fit.initial_params(spec)
            assert np.all(np.isfinite(start.theta))
            assert np.isfinite(model.log_likelihood(spec, start))

    def test_moment_based_precision(self):
        spec, _ = _easy_spec(seed=3, n=50)
        start = fit.initial_params(spec)
        y = spec.y
        phi_mom = y.mean() * (1.0 + y.mean()) / y.var(ddof=1)
        assert start.nu[0] == pytest.approx(np.log(phi_mom), rel=1e-12)

    def test_constant_response_falls_back(self):
        n = 10
        X = np.column_stack([np.ones(n), np.linspace(-1, 1, n)])
        spec = model.ModelSpec(np.full(n, 0.7), X, np.ones((n, 1)))
        start = fit.initial_params(spec)
        # zero sample variance pins the moment precision at its default
        assert start.nu[0] == 0.0
        assert np.all(np.isfinite(start.theta))


class TestFitMle:
    def test_converges_near_truth(self):
        spec, truth = _easy_spec()
        res = fit.fit_mle(spec)
        assert res.converged
        assert res.method == "mle"
        assert np.all(np.abs(res.theta.theta - truth.theta) < 1.0)
        assert res.loglik == model.log_likelihood(spec, res.theta)
        u = model.score(spec, res.theta)
        assert res.max_abs_score == np.max(np.abs(u))
        assert res.max_abs_score < 1e-8 * (1.0 + abs(res.loglik))

    def test_std_errors_from_information(self):
        spec, _ = _easy_spec()
        res = fit.fit_mle(spec)
        kinv = model.information_inverse(
            model.expected_information(spec, res.theta).K
        )
        np.testing.assert_allclose(res.std_errors, np.sqrt(np.diag(kinv)), rtol=1e-12)
        assert np.all(res.std_errors > 0.0)

    def test_row_permutation_invariant(self):
        spec, _ = _easy_spec(seed=11)
        perm = np.random.default_rng(0).permutation(spec.n)
        shuffled = model.ModelSpec(spec.y[perm], spec.X[perm], spec.Z[perm])
        a = fit.fit_mle(spec).theta.theta
        b = fit.fit_mle(shuffled).theta.theta
        np.testing.assert_allclose(a, b, rtol=1e-7)

    def test_warm_start_agrees(self):
        spec, truth = _easy_spec(seed=13)
        cold = fit.fit_mle(spec)
        warm = fit.fit_mle(spec, init=truth)
        np.testing.assert_allclose(cold.theta.theta, warm.theta.theta, rtol=1e-7)

    def test_iteration_budget_exhausted(self):
        spec, _ = _easy_spec(seed=17)
        with pytest.raises(NonConvergence) as info:
            fit.fit_mle(spec, fit.FitOptions(max_iter=1))
        assert info.value.iterations == 1
        assert info.value.last_theta is not None

    def test_unevaluable_start(self):
        spec, _ = _easy_spec(seed=19)
        bad = model.ParamVector(np.array([600.0, 0.0]), np.array([600.0]))
        with pytest.raises(NonConvergence):
            fit.fit_mle(spec, init=bad)


class TestFitCoxSnell:
    def test_subtracts_bias_at_mle(self):
        spec, _ = _easy_spec(seed=23)
        mle = fit.fit_mle(spec)
        res = fit.fit_cox_snell(spec)
        expected = bias.cox_snell_bias(spec, mle.theta)
        assert res.method == "cox_snell"
        np.testing.assert_array_equal(res.bias_applied, expected.joint)
        np.testing.assert_array_equal(
            res.theta.theta, mle.theta.theta - expected.joint
        )
        # standard errors are carried over from the MLE evaluation point
        np.testing.assert_array_equal(res.std_errors, mle.std_errors)


class TestFitFirth:
    def test_roots_the_modified_score(self):
        spec, _ = _easy_spec(seed=29)
        res = fit.fit_firth(spec)
        assert res.converged
        assert res.method == "firth"
        ustar = bias.modified_score(spec, res.theta)
        assert np.max(np.abs(ustar)) < 1e-8
        assert res.max_abs_score == pytest.approx(np.max(np.abs(ustar)), abs=1e-12)

    def test_differs_from_mle(self):
        spec, _ = _easy_spec(seed=29)
        mle = fit.fit_mle(spec)
        res = fit.fit_firth(spec)
        assert np.max(np.abs(res.theta.theta - mle.theta.theta)) > 1e-4

    def test_score_hook_recovers_mle(self):
        spec, _ = _easy_spec(seed=31)
        mle = fit.fit_mle(spec)
        res = fit.fit_firth(spec, _modified_score=lambda s, th: model.score(s, th))
        np.testing.assert_allclose(res.theta.theta, mle.theta.theta, atol=1e-6)

    def test_explicit_init(self):
        spec, truth = _easy_spec(seed=37)
        res = fit.fit_firth(spec, init=truth)
        assert res.converged
        assert np.max(np.abs(bias.modified_score(spec, res.theta))) < 1e-8


class TestFitBootstrap:
    def test_degenerate_resample_identity(self):
        spec, _ = _easy_spec(seed=41)
        mle = fit.fit_mle(spec)
        res = fit.fit_bootstrap(
            spec,
            fit.FitOptions(bootstrap_reps=4, seed=0),
            _resample_fit=lambda s: mle,
        )
        # every resample returning theta_hat collapses 2 theta_hat - mean
        np.testing.assert_allclose(res.theta.theta, mle.theta.theta, rtol=1e-14)
        np.testing.assert_allclose(res.bias_applied, 0.0, atol=1e-14)

    def test_reflection_around_mle(self):
        spec, _ = _easy_spec(seed=43)
        mle = fit.fit_mle(spec)
        shifted = model.ParamVector.from_theta(
            mle.theta.theta + 0.1, spec.p, spec.q
        )
        stub = fit.FitResult(
            method="mle",
            theta=shifted,
            std_errors=mle.std_errors,
            loglik=0.0,
            iterations=1,
            converged=True,
            max_abs_score=0.0,
        )
        res = fit.fit_bootstrap(
            spec,
            fit.FitOptions(bootstrap_reps=3, seed=1),
            _resample_fit=lambda s: stub,
        )
        np.testing.assert_allclose(
            res.theta.theta, mle.theta.theta - 0.1, rtol=1e-12
        )
        np.testing.assert_allclose(res.bias_applied, 0.1, rtol=1e-12)

    def test_seeded_determinism(self):
        spec, _ = _easy_spec(seed=47, n=50)
        opts = fit.FitOptions(bootstrap_reps=5, seed=9)
        a = fit.fit_bootstrap(spec, opts)
        b = fit.fit_bootstrap(spec, opts)
        np.testing.assert_array_equal(a.theta.theta, b.theta.theta)
        c = fit.fit_bootstrap(spec, fit.FitOptions(bootstrap_reps=5, seed=10))
        assert np.max(np.abs(c.theta.theta - a.theta.theta)) > 0.0

    def test_single_replication(self):
        spec, _ = _easy_spec(seed=53, n=50)
        res = fit.fit_bootstrap(spec, fit.FitOptions(bootstrap_reps=1, seed=2))
        assert res.method == "bootstrap"
        assert np.all(np.isfinite(res.theta.theta))

    def test_redraw_budget_exhausted(self):
        spec, _ = _easy_spec(seed=59, n=50)

        def always_fails(s):
            raise NonConvergence("stub")

        with pytest.raises(NonConvergence, match="redraws"):
            fit.fit_bootstrap(
                spec,
                fit.FitOptions(bootstrap_reps=1, seed=3),
                _resample_fit=always_fails,
            )


class TestDispatch:
    def test_routes_by_method(self):
        spec, _ = _easy_spec(seed=61, n=50)
        for method in ("mle", "cox_snell", "firth", "bootstrap"):
            opts = fit.FitOptions(method=method, bootstrap_reps=3, seed=4)
            assert fit.fit(spec, opts).method == method

    def test_default_is_mle(self):
        spec, _ = _easy_spec(seed=67, n=50)
        assert fit.fit(spec).method == "mle"
