"""Regression structure for the beta prime model.

Two submodels are linked to the distribution parameters,
g1(mu_i) = x_i' beta and g2(phi_i) = z_i' nu, and fitted jointly.  This
module carries the designs, the link functions with their derivative
hooks, the log-likelihood, the analytic score, and the expected Fisher
information in both block and stacked forms.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import special
from .exceptions import DomainError, InvalidData, SingularInformation

_COND_LIMIT = 1e12


@dataclass(frozen=True)
class LinkFns:
    """A link function g with the derivative hooks of its inverse.

    ``inv`` maps the linear predictor eta to the parameter, ``dinv`` and
    ``d2inv`` are the first and second derivatives of ``inv`` with respect
    to eta.  Carrying both derivatives keeps every downstream cumulant
    formula link-generic.
    """

    name: str
    g: Callable
    inv: Callable
    dinv: Callable
    d2inv: Callable


LOG_LINK = LinkFns("log", np.log, np.exp, np.exp, np.exp)

_LINKS = {"log": LOG_LINK}


def get_link(name):
    """Look up a registered link by identifier."""
    if isinstance(name, LinkFns):
        return name
    try:
        return _LINKS[name]
    except KeyError:
        raise InvalidData(f"unknown link {name!r}; available: {sorted(_LINKS)}") from None


@dataclass(frozen=True)
class ModelSpec:
    """Response and designs for one beta prime regression problem.

    Parameters
    ----------
    y : (n,) array
        Strictly positive response.
    X : (n, p) array
        Mean submodel design, full column rank.
    Z : (n, q) array
        Precision submodel design, full column rank, with q < n - p.
    link_mu, link_phi : str
        Link identifiers for the two submodels (only ``"log"`` ships).
    """

    y: np.ndarray
    X: np.ndarray
    Z: np.ndarray
    link_mu: str = "log"
    link_phi: str = "log"

    def __post_init__(self):
        y = np.asarray(self.y, dtype=np.float64)
        X = np.asarray(self.X, dtype=np.float64)
        Z = np.asarray(self.Z, dtype=np.float64)
        if y.ndim != 1:
            raise InvalidData("y must be a 1-d vector")
        n = y.shape[0]
        if X.ndim != 2 or X.shape[0] != n:
            raise InvalidData("X must be a 2-d matrix with one row per observation")
        if Z.ndim != 2 or Z.shape[0] != n:
            raise InvalidData("Z must be a 2-d matrix with one row per observation")
        if not np.all(np.isfinite(y)) or np.any(y <= 0.0):
            raise InvalidData("all responses must be positive and finite")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(Z))):
            raise InvalidData("design matrices must be finite")
        p = X.shape[1]
        q = Z.shape[1]
        if n < p + q + 1:
            raise InvalidData(f"need n >= p + q + 1, got n={n}, p={p}, q={q}")
        if q >= n - p:
            raise InvalidData(f"need q < n - p, got n={n}, p={p}, q={q}")
        if np.linalg.matrix_rank(X) != p:
            raise InvalidData("X does not have full column rank")
        if np.linalg.matrix_rank(Z) != q:
            raise InvalidData("Z does not have full column rank")
        get_link(self.link_mu)
        get_link(self.link_phi)
        y = y.copy()
        X = X.copy()
        Z = Z.copy()
        for arr in (y, X, Z):
            arr.setflags(write=False)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "Z", Z)

    @property
    def n(self):
        return self.y.shape[0]

    @property
    def p(self):
        return self.X.shape[1]

    @property
    def q(self):
        return self.Z.shape[1]

    @property
    def mean_link(self):
        return get_link(self.link_mu)

    @property
    def prec_link(self):
        return get_link(self.link_phi)


@dataclass(frozen=True)
class ParamVector:
    """Concatenated parameter vector theta = (beta, nu) with the p/q split."""

    beta: np.ndarray
    nu: np.ndarray

    def __post_init__(self):
        beta = np.atleast_1d(np.asarray(self.beta, dtype=np.float64))
        nu = np.atleast_1d(np.asarray(self.nu, dtype=np.float64))
        if beta.ndim != 1 or nu.ndim != 1:
            raise InvalidData("beta and nu must be 1-d vectors")
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "nu", nu)

    @property
    def theta(self):
        return np.concatenate([self.beta, self.nu])

    @classmethod
    def from_theta(cls, theta, p, q):
        theta = np.asarray(theta, dtype=np.float64)
        if theta.shape != (p + q,):
            raise InvalidData(f"theta must have length p + q = {p + q}")
        return cls(theta[:p], theta[p:])


def linear_predictors(spec, params):
    """eta1 = X beta and eta2 = Z nu."""
    return spec.X @ params.beta, spec.Z @ params.nu


def fitted_values(spec, params):
    """(mu, phi) through the inverse links."""
    eta1, eta2 = linear_predictors(spec, params)
    return spec.mean_link.inv(eta1), spec.prec_link.inv(eta2)


@dataclass(frozen=True)
class LinkState:
    """Fitted parameters and link derivatives at one theta."""

    mu: np.ndarray
    phi: np.ndarray
    dmu: np.ndarray
    d2mu: np.ndarray
    dphi: np.ndarray
    d2phi: np.ndarray


def link_state(spec, params):
    """Evaluate mu, phi and the link derivative hooks at ``params``."""
    eta1, eta2 = linear_predictors(spec, params)
    lm = spec.mean_link
    lp = spec.prec_link
    return LinkState(
        mu=lm.inv(eta1),
        phi=lp.inv(eta2),
        dmu=lm.dinv(eta1),
        d2mu=lm.d2inv(eta1),
        dphi=lp.dinv(eta2),
        d2phi=lp.d2inv(eta2),
    )


def _valid_state(mu, phi):
    # min > 0 rejects nonpositives and NaN, max < inf rejects overflow
    return (
        mu.min() > 0.0
        and mu.max() < np.inf
        and phi.min() > 0.0
        and phi.max() < np.inf
    )


def log_likelihood(spec, params):
    """Log-likelihood of theta under the beta prime regression model.

    Sum over observations of the BP(mu_i, phi_i) log-density at y_i.
    Returns ``-inf`` when theta does not yield finite positive (mu, phi)
    or the likelihood itself is not finite; callers treat that as a
    rejected evaluation.
    """
    mu, phi = fitted_values(spec, params)
    if not _valid_state(mu, phi):
        return -np.inf
    y = spec.y
    with np.errstate(over="ignore"):
        alpha = mu * (1.0 + phi)
        tau = alpha + phi + 2.0
    # tau finite implies alpha finite (alpha = tau - phi - 2)
    if tau.max() == np.inf:
        return -np.inf
    n = alpha.shape[0]
    try:
        lg = special.log_gamma(np.concatenate((alpha, phi + 2.0, tau)))
    except DomainError:
        return -np.inf
    value = np.sum(
        (alpha - 1.0) * np.log(y)
        - tau * np.log1p(y)
        - lg[:n]
        - lg[n : 2 * n]
        + lg[2 * n :]
    )
    return value if np.isfinite(value) else -np.inf


def score(spec, params):
    """Analytic score U(theta) = (U_beta, U_nu).

    With alpha_i = mu_i (1 + phi_i) and tau_i = alpha_i + phi_i + 2:

    U_beta = X' diag(dmu/deta1) s_mu,
    s_mu,i = (1 + phi_i)[ln y_i - ln(1 + y_i) - psi(alpha_i) + psi(tau_i)],

    U_nu = Z' diag(dphi/deta2) s_phi,
    s_phi,i = mu_i ln y_i - (1 + mu_i) ln(1 + y_i) - mu_i psi(alpha_i)
              - psi(phi_i + 2) + (1 + mu_i) psi(tau_i).
    """
    st = link_state(spec, params)
    mu, phi = st.mu, st.phi
    if not _valid_state(mu, phi):
        raise DomainError("score requires finite positive mu and phi")
    y = spec.y
    logy = np.log(y)
    log1py = np.log1p(y)
    with np.errstate(over="ignore"):
        alpha = mu * (1.0 + phi)
        tau = alpha + phi + 2.0
    n = alpha.shape[0]
    psi = special.digamma(np.concatenate((alpha, tau, phi + 2.0)))
    psi_alpha = psi[:n]
    psi_tau = psi[n : 2 * n]
    s_mu = (1.0 + phi) * (logy - log1py - psi_alpha + psi_tau)
    s_phi = (
        mu * logy
        - (1.0 + mu) * log1py
        - mu * psi_alpha
        - psi[2 * n :]
        + (1.0 + mu) * psi_tau
    )
    u_beta = spec.X.T @ (st.dmu * s_mu)
    u_nu = spec.Z.T @ (st.dphi * s_phi)
    return np.concatenate([u_beta, u_nu])


@dataclass(frozen=True)
class InfoBlocks:
    """Expected Fisher information at one theta.

    ``K_bb``, ``K_bn`` and ``K_nn`` hold the diagonals of the n x n weight
    matrices; ``K`` is the assembled (p+q) x (p+q) matrix
    X' K_bb X | X' K_bn Z / Z' K_bn X | Z' K_nn Z.  The stacked forms
    satisfy K = Xtilde' Ktilde Xtilde.
    """

    K_bb: np.ndarray
    K_bn: np.ndarray
    K_nn: np.ndarray
    K: np.ndarray
    _X: np.ndarray = field(repr=False)
    _Z: np.ndarray = field(repr=False)

    @property
    def Ktilde(self):
        """The 2n x 2n weight matrix [[diag K_bb, diag K_bn], [diag K_bn, diag K_nn]]."""
        n = self.K_bb.shape[0]
        out = np.zeros((2 * n, 2 * n))
        idx = np.arange(n)
        out[idx, idx] = self.K_bb
        out[idx, n + idx] = self.K_bn
        out[n + idx, idx] = self.K_bn
        out[n + idx, n + idx] = self.K_nn
        return out

    @property
    def Xtilde(self):
        """The 2n x (p+q) stacked design [[X, 0], [0, Z]]."""
        n, p = self._X.shape
        q = self._Z.shape[1]
        out = np.zeros((2 * n, p + q))
        out[:n, :p] = self._X
        out[n:, p:] = self._Z
        return out


def expected_information(spec, params):
    """Expected Fisher information with its diagonal weight blocks.

    With alpha_i = mu_i (1 + phi_i), tau_i = alpha_i + phi_i + 2,
    a_i = psi'(alpha_i) - psi'(tau_i) and
    b_i = mu_i^2 psi'(alpha_i) - (1 + mu_i)^2 psi'(tau_i) + psi'(phi_i + 2),
    the weights are

    K_bb,i = (1 + phi_i)^2 a_i (dmu/deta1)^2,
    K_bn,i = (1 + phi_i)[a_i mu_i - psi'(tau_i)] (dmu/deta1)(dphi/deta2),
    K_nn,i = b_i (dphi/deta2)^2.

    Raises
    ------
    SingularInformation
        When the assembled K is numerically singular
        (condition number above 1e12) or non-finite.
    """
    st = link_state(spec, params)
    mu, phi = st.mu, st.phi
    if not _valid_state(mu, phi):
        raise DomainError("expected_information requires finite positive mu and phi")
    alpha = mu * (1.0 + phi)
    tau = alpha + phi + 2.0
    n = alpha.shape[0]
    psi1 = special.trigamma(np.concatenate((alpha, tau, phi + 2.0)))
    psi1_alpha = psi1[:n]
    psi1_tau = psi1[n : 2 * n]
    a = psi1_alpha - psi1_tau
    b = mu**2 * psi1_alpha - (1.0 + mu) ** 2 * psi1_tau + psi1[2 * n :]
    w_bb = (1.0 + phi) ** 2 * a * st.dmu**2
    w_bn = (1.0 + phi) * (a * mu - psi1_tau) * st.dmu * st.dphi
    w_nn = b * st.dphi**2
    X, Z = spec.X, spec.Z
    p, q = spec.p, spec.q
    kbn = X.T @ (w_bn[:, None] * Z)
    K = np.empty((p + q, p + q))
    K[:p, :p] = X.T @ (w_bb[:, None] * X)
    K[:p, p:] = kbn
    K[p:, :p] = kbn.T
    K[p:, p:] = Z.T @ (w_nn[:, None] * Z)
    if not np.isfinite(K).all():
        raise SingularInformation("expected information has non-finite entries")
    # 2-norm condition via eigvalsh; K is symmetric so |eigenvalues| are
    # the singular values
    w = np.abs(np.linalg.eigvalsh(K))
    wmin = w.min()
    if wmin == 0.0 or w.max() / wmin > _COND_LIMIT:
        raise SingularInformation(
            f"expected information is numerically singular (cond > {_COND_LIMIT:g})"
        )
    return InfoBlocks(K_bb=w_bb, K_bn=w_bn, K_nn=w_nn, K=K, _X=X, _Z=Z)


def cholesky_solve(K, rhs):
    """Solve K x = rhs for symmetric positive definite K via Cholesky.

    Raises ``SingularInformation`` when the factorization fails; no ridge
    or pseudo-inverse fallback is attempted because downstream bias
    formulas need the exact inverse blocks.
    """
    try:
        L = np.linalg.cholesky(K)
    except np.linalg.LinAlgError as exc:
        raise SingularInformation("Cholesky factorization of K failed") from exc
    half = np.linalg.solve(L, rhs)
    return np.linalg.solve(L.T, half)


def information_inverse(K):
    """Full inverse of a positive definite K through its Cholesky factor."""
    eye = np.eye(K.shape[0])
    return cholesky_solve(K, eye)
