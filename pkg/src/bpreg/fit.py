"""Estimation drivers: Fisher scoring MLE, corrective, preventive, bootstrap.

All four return a ``FitResult``.  Standard errors come from the inverse
of the expected information evaluated at the method's own estimate, with
one exception: the corrective (Cox-Snell) estimator reports them at the
MLE, which is where its information matrix was computed.
"""

import dataclasses
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import bias, bpdist, model
from .exceptions import (
    DomainError,
    NonConvergence,
    SingularInformation,
)

_METHODS = ("mle", "cox_snell", "firth", "bootstrap")
_MAX_REDRAWS = 10


@dataclass
class FitOptions:
    """Tuning knobs shared by the estimation drivers.

    ``tol_score`` is applied to the max-abs score scaled by 1 + |loglik|
    for the MLE and unscaled to the modified score for the preventive
    fit.  ``tol_step`` bounds the relative parameter change.  ``seed``
    feeds the parametric bootstrap; replicate streams are split from it.
    """

    max_iter: int = 200
    tol_score: float = 1e-8
    tol_step: float = 1e-10
    step_halvings: int = 30
    method: str = "mle"
    bootstrap_reps: int = 500
    seed: Optional[int] = None

    def __post_init__(self):
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if not (self.tol_score > 0.0 and self.tol_step > 0.0):
            raise ValueError("tolerances must be positive")
        if self.step_halvings < 0:
            raise ValueError("step_halvings must be non-negative")
        if self.bootstrap_reps < 1:
            raise ValueError("bootstrap_reps must be at least 1")
        if self.method not in _METHODS:
            raise ValueError(f"method must be one of {_METHODS}")


@dataclass
class FitResult:
    """Outcome of one estimation run.

    ``std_errors`` holds sqrt of the diagonal of K^-1 (see module note on
    the evaluation point).  ``max_abs_score`` is the max-abs ordinary
    score at the returned estimate, except for the preventive fit where
    it refers to the modified score.  ``bias_applied`` carries the
    subtracted bias estimate for the corrective and bootstrap methods.
    """

    method: str
    theta: model.ParamVector
    std_errors: np.ndarray
    loglik: float
    iterations: int
    converged: bool
    max_abs_score: float
    bias_applied: Optional[np.ndarray] = None


def initial_params(spec):
    """Warm start for the scoring iterations.

    beta0 solves least squares of g1(y) on X (responses clamped below at
    1e-10 before the link), nu0 puts the whole precision mass on its
    first coordinate via g2 of the method-of-moments precision
    phi = ybar (1 + ybar) / s^2 from the marginal response moments.
    """
    y = spec.y
    glink = spec.mean_link.g
    target = glink(np.clip(y, 1e-10, None))
    beta0, *_ = np.linalg.lstsq(spec.X, target, rcond=None)
    ybar = float(np.mean(y))
    s2 = float(np.var(y, ddof=1)) if spec.n > 1 else 0.0
    phi_mom = ybar * (1.0 + ybar) / s2 if s2 > 0.0 else 1.0
    if not np.isfinite(phi_mom):
        phi_mom = 1.0
    phi_mom = float(np.clip(phi_mom, 1e-6, 1e6))
    nu0 = np.zeros(spec.q)
    if spec.q > 0:
        nu0[0] = spec.prec_link.g(phi_mom)
    return model.ParamVector(beta0, nu0)


def _std_errors(spec, params):
    info = model.expected_information(spec, params)
    kinv = model.information_inverse(info.K)
    return np.sqrt(np.diag(kinv))


def fit_mle(spec, opts=None, init=None):
    """Maximum likelihood by Fisher scoring with step halving.

    Iterates theta <- theta + lambda K^-1 U, halving lambda until the
    log-likelihood does not decrease.  Stops when the scaled score is
    below ``tol_score`` or the relative step is below ``tol_step``.

    Near the optimum the log-likelihood saturates at machine precision
    while the score is still informative, and the undamped step can
    overshoot when the observed curvature exceeds the expected one.  A
    candidate that ties the log-likelihood within rounding is therefore
    accepted only if it also shrinks the max-abs score, which damps the
    step exactly when damping is needed.

    Raises
    ------
    NonConvergence
        When the iteration or step-halving budget runs out.
    SingularInformation
        When K cannot be factorized along the path.
    """
    opts = opts or FitOptions()
    params = initial_params(spec) if init is None else init
    ll = model.log_likelihood(spec, params)
    if not np.isfinite(ll):
        raise NonConvergence("initial point is not evaluable", iterations=0)
    converged = False
    iterations = 0
    for iterations in range(1, opts.max_iter + 1):
        u = model.score(spec, params)
        scale = 1.0 + abs(ll)
        if np.max(np.abs(u)) < opts.tol_score * scale:
            converged = True
            iterations -= 1
            break
        info = model.expected_information(spec, params)
        direction = model.cholesky_solve(info.K, u)
        norm_u = np.max(np.abs(u))
        lam = 1.0
        accepted = False
        for _ in range(opts.step_halvings + 1):
            candidate = model.ParamVector.from_theta(
                params.theta + lam * direction, spec.p, spec.q
            )
            ll_cand = model.log_likelihood(spec, candidate)
            if np.isfinite(ll_cand):
                if ll_cand > ll:
                    accepted = True
                    break
                if ll_cand >= ll - 1e-13 * scale:
                    try:
                        u_cand = model.score(spec, candidate)
                    except DomainError:
                        u_cand = None
                    if u_cand is not None and np.max(np.abs(u_cand)) < norm_u:
                        accepted = True
                        break
            lam *= 0.5
        if not accepted:
            raise NonConvergence(
                "step halving failed to find an acceptable step",
                iterations=iterations,
                last_theta=params.theta,
            )
        step = lam * direction
        params = candidate
        ll = ll_cand
        if np.max(np.abs(step) / (1.0 + np.abs(params.theta))) < opts.tol_step:
            converged = True
            break
    if not converged:
        raise NonConvergence(
            f"no convergence in {opts.max_iter} iterations",
            iterations=opts.max_iter,
            last_theta=params.theta,
        )
    return FitResult(
        method="mle",
        theta=params,
        std_errors=_std_errors(spec, params),
        loglik=ll,
        iterations=iterations,
        converged=True,
        max_abs_score=float(np.max(np.abs(model.score(spec, params)))),
    )


def fit_firth(spec, opts=None, init=None, _modified_score=None):
    """Preventive fit: root of the modified score U*.

    Modified Fisher scoring theta <- theta + lambda K^-1 U* starting from
    the MLE (or from the warm start strategy when the MLE itself fails),
    halving lambda on the max-abs of U*.  Converged when
    max|U*| < ``tol_score``.

    The scoring direction is not always a descent direction for |U*|
    (the map uses expected curvature), so when no halved step reduces
    the norm the full step is taken anyway and the iteration limit is
    the only guard; in practice one such escape restores contraction.

    ``_modified_score`` is a test hook replacing the adjusted score
    function; with the ordinary score substituted the run reduces to the
    MLE.
    """
    opts = opts or FitOptions()
    if _modified_score is None:
        state_fn = bias.modified_score_state
    else:
        def state_fn(s, th):
            return _modified_score(s, th), None
    if init is None:
        try:
            init = fit_mle(spec, opts).theta
        except (NonConvergence, SingularInformation):
            init = initial_params(spec)
    params = init
    ustar, ws = state_fn(spec, params)
    norm = float(np.max(np.abs(ustar)))
    converged = False
    iterations = 0
    for iterations in range(1, opts.max_iter + 1):
        if norm < opts.tol_score:
            converged = True
            iterations -= 1
            break
        K = ws.K if ws is not None else model.expected_information(spec, params).K
        direction = model.cholesky_solve(K, ustar)
        lam = 1.0
        accepted = None
        fallback = None
        for _ in range(opts.step_halvings + 1):
            candidate = model.ParamVector.from_theta(
                params.theta + lam * direction, spec.p, spec.q
            )
            try:
                ustar_cand, ws_cand = state_fn(spec, candidate)
            except (DomainError, SingularInformation, ArithmeticError):
                lam *= 0.5
                continue
            norm_cand = float(np.max(np.abs(ustar_cand)))
            if not np.isfinite(norm_cand):
                lam *= 0.5
                continue
            if fallback is None:
                fallback = (candidate, ustar_cand, ws_cand, norm_cand)
            if norm_cand < norm:
                accepted = (candidate, ustar_cand, ws_cand, norm_cand)
                break
            lam *= 0.5
        if accepted is None:
            accepted = fallback
        if accepted is None:
            raise NonConvergence(
                "no evaluable step along the scoring direction",
                iterations=iterations,
                last_theta=params.theta,
            )
        params, ustar, ws, norm = accepted
    if not converged:
        raise NonConvergence(
            f"no convergence in {opts.max_iter} iterations",
            iterations=opts.max_iter,
            last_theta=params.theta,
        )
    return FitResult(
        method="firth",
        theta=params,
        std_errors=_std_errors(spec, params),
        loglik=model.log_likelihood(spec, params),
        iterations=iterations,
        converged=True,
        max_abs_score=norm,
    )


def fit_cox_snell(spec, opts=None):
    """Corrective fit: the MLE minus its estimated second order bias.

    Standard errors are reported at the MLE (same information matrix
    evaluation point), so they coincide with the MLE's.
    """
    opts = opts or FitOptions()
    mle = fit_mle(spec, opts)
    result = bias.cox_snell_bias(spec, mle.theta)
    corrected = model.ParamVector.from_theta(
        mle.theta.theta - result.joint, spec.p, spec.q
    )
    return FitResult(
        method="cox_snell",
        theta=corrected,
        std_errors=mle.std_errors,
        loglik=model.log_likelihood(spec, corrected),
        iterations=mle.iterations,
        converged=mle.converged,
        max_abs_score=float(np.max(np.abs(model.score(spec, corrected)))),
        bias_applied=result.joint,
    )


def fit_bootstrap(spec, opts=None, _resample_fit=None):
    """Parametric bootstrap correction, 2 theta_hat - mean of refits.

    Draws ``opts.bootstrap_reps`` parametric resamples from
    BP(mu_hat_i, phi_hat_i), refits each by maximum likelihood warm
    started at theta_hat, and returns
    2 theta_hat - mean_b theta_hat*_b.  With one replication this is the
    warp-speed rule.  A resample whose refit fails is redrawn from the
    same stream, at most 10 times, keeping the replication count exact.

    Replicate streams are split from ``opts.seed``; the reduction is an
    indexed mean, so results do not depend on evaluation order.
    """
    opts = opts or FitOptions()
    mle = fit_mle(spec, opts)
    mu_hat, phi_hat = model.fitted_values(spec, mle.theta)

    def _default_resample_fit(spec_star):
        return fit_mle(spec_star, opts, init=mle.theta)

    refit = _default_resample_fit if _resample_fit is None else _resample_fit
    streams = np.random.SeedSequence(opts.seed).spawn(opts.bootstrap_reps)
    stars = np.empty((opts.bootstrap_reps, spec.p + spec.q))
    for b, child in enumerate(streams):
        rng = np.random.Generator(np.random.PCG64(child))
        last_error = None
        for _ in range(1 + _MAX_REDRAWS):
            y_star = bpdist.sample_bp(mu_hat, phi_hat, rng)
            try:
                star = refit(dataclasses.replace(spec, y=y_star))
            except (NonConvergence, SingularInformation) as exc:
                last_error = exc
                continue
            stars[b] = star.theta.theta
            break
        else:
            raise NonConvergence(
                f"bootstrap resample {b} failed after {_MAX_REDRAWS} redraws"
            ) from last_error
    boot_mean = stars.mean(axis=0)
    corrected = model.ParamVector.from_theta(
        2.0 * mle.theta.theta - boot_mean, spec.p, spec.q
    )
    return FitResult(
        method="bootstrap",
        theta=corrected,
        std_errors=_std_errors(spec, corrected),
        loglik=model.log_likelihood(spec, corrected),
        iterations=mle.iterations,
        converged=mle.converged,
        max_abs_score=float(np.max(np.abs(model.score(spec, corrected)))),
        bias_applied=boot_mean - mle.theta.theta,
    )


def fit(spec, opts=None):
    """Dispatch on ``opts.method``."""
    opts = opts or FitOptions()
    driver = {
        "mle": fit_mle,
        "cox_snell": fit_cox_snell,
        "firth": fit_firth,
        "bootstrap": fit_bootstrap,
    }[opts.method]
    return driver(spec, opts)
