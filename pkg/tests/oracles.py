"""Independent reference implementations used to pin the package's math.

Everything here is deliberately written against scipy and brute-force
index sums rather than the package's own vectorized forms, so that a
transcription error in one side cannot hide in the other.  Log links are
assumed throughout (the only links the package ships).
"""

import numpy as np
import scipy.integrate
import scipy.special as sp


def scalar_set(mu, phi):
    """The cumulant scalar sequences a..e plus the tau polygammas, via scipy."""
    mu = np.asarray(mu, dtype=np.float64)
    phi = np.asarray(phi, dtype=np.float64)
    alpha = mu * (1.0 + phi)
    tau = alpha + phi + 2.0
    p1a = sp.polygamma(1, alpha)
    p1t = sp.polygamma(1, tau)
    p1f = sp.polygamma(1, phi + 2.0)
    p2a = sp.polygamma(2, alpha)
    p2t = sp.polygamma(2, tau)
    p2f = sp.polygamma(2, phi + 2.0)
    return {
        "a": p1a - p1t,
        "b": mu**2 * p1a - (1.0 + mu) ** 2 * p1t + p1f,
        "c": p2a - p2t,
        "d": (1.0 + mu) ** 2 * p2t - mu**2 * p2a,
        "e": (1.0 + mu) ** 3 * p2t - mu**3 * p2a - p2f,
        "psi1_tau": p1t,
        "psi2_tau": p2t,
    }


def info_weights(mu, phi):
    """Diagonal information weights (w_bb, w_bn, w_nn) under log links."""
    s = scalar_set(mu, phi)
    g = 1.0 + phi
    dmu, dphi = mu, phi
    w_bb = g**2 * s["a"] * dmu**2
    w_bn = g * (s["a"] * mu - s["psi1_tau"]) * dmu * dphi
    w_nn = s["b"] * dphi**2
    return w_bb, w_bn, w_nn


def info_matrix(X, Z, mu, phi):
    """Assembled (p+q) x (p+q) expected information, scipy route."""
    w_bb, w_bn, w_nn = info_weights(mu, phi)
    kbb = X.T @ (w_bb[:, None] * X)
    kbn = X.T @ (w_bn[:, None] * Z)
    knn = Z.T @ (w_nn[:, None] * Z)
    top = np.hstack([kbb, kbn])
    bottom = np.hstack([kbn.T, knn])
    return np.vstack([top, bottom])


def third_cumulant_weights(mu, phi):
    """Per-observation weights of the third log-likelihood cumulants.

    Keys count how many of the three derivative indices sit in the mean
    block: 3 = (beta,beta,beta) down to 0 = (nu,nu,nu).  All four are
    fully symmetric in their indices.
    """
    s = scalar_set(mu, phi)
    g = 1.0 + phi
    dmu = d2mu = mu
    dphi = d2phi = phi
    t = s["psi1_tau"] - s["a"] * mu
    return {
        3: -(g**2) * (g * s["c"] * dmu**3 + 3.0 * s["a"] * dmu * d2mu),
        2: -g * (2.0 * s["a"] + g * (s["c"] * mu - s["psi2_tau"])) * dmu**2 * dphi
        + g * t * d2mu * dphi,
        1: t * (g * dmu * d2phi + 2.0 * dphi**2 * dmu) + g * s["d"] * dmu * dphi**2,
        0: s["e"] * dphi**3 - 3.0 * s["b"] * dphi * d2phi,
    }


def info_derivative_weights(mu, phi):
    """Per-observation weights of d kappa_rs / d theta_u.

    Keyed by (pair block, derivative block): ("bb","n") is the nu
    derivative of a (beta, beta) second cumulant, and so on.  Symmetric
    in the pair only.  Convention: kappa_rs = E[d2 loglik], so these are
    the negatives of the information weight derivatives.
    """
    s = scalar_set(mu, phi)
    g = 1.0 + phi
    dmu = d2mu = mu
    dphi = d2phi = phi
    t = s["psi1_tau"] - s["a"] * mu
    cmu = s["c"] * mu - s["psi2_tau"]
    return {
        ("bb", "b"): -(g**2) * (g * s["c"] * dmu**3 + 2.0 * s["a"] * dmu * d2mu),
        ("bb", "n"): -(g**2 * cmu + 2.0 * g * s["a"]) * dmu**2 * dphi,
        ("bn", "b"): -g * (g * mu * s["c"] + s["a"] - g * s["psi2_tau"]) * dmu**2 * dphi
        + g * t * d2mu * dphi,
        ("bn", "n"): (g * s["d"] + t) * dmu * dphi**2 + g * t * dmu * d2phi,
        ("nn", "b"): (g * s["d"] + 2.0 * t) * dmu * dphi**2,
        ("nn", "n"): s["e"] * dphi**3 - 2.0 * s["b"] * dphi * d2phi,
    }


def index_sum_bias(X, Z, mu, phi):
    """Brute-force second order bias: the eight-fold block-split sum.

    B_a = sum_{r,s,u} K^{ar} K^{su} (kappa_rs^{(u)} - kappa_rsu / 2)
    evaluated index by index over all (p+q)^3 triples, the blocks of
    (r, s, u) deciding which per-observation weight applies.
    """
    n, p = X.shape
    q = Z.shape[1]
    k = p + q
    cum = third_cumulant_weights(mu, phi)
    der = info_derivative_weights(mu, phi)
    kinv = np.linalg.inv(info_matrix(X, Z, mu, phi))

    def col(j):
        return X[:, j] if j < p else Z[:, j - p]

    def blk(j):
        return "b" if j < p else "n"

    bias = np.zeros(k)
    for a in range(k):
        total = 0.0
        for r in range(k):
            for s in range(k):
                for u in range(k):
                    nb = (blk(r) == "b") + (blk(s) == "b") + (blk(u) == "b")
                    pair = "".join(sorted(blk(r) + blk(s)))
                    w = der[(pair, blk(u))] - 0.5 * cum[nb]
                    tensor = float(np.sum(w * col(r) * col(s) * col(u)))
                    total += kinv[a, r] * kinv[s, u] * tensor
        bias[a] = total
    return bias


def score_fd(loglik, theta, h=1e-6):
    """Central finite differences of a scalar function of theta."""
    theta = np.asarray(theta, dtype=np.float64)
    out = np.zeros_like(theta)
    for j in range(theta.shape[0]):
        step = np.zeros_like(theta)
        step[j] = h
        out[j] = (loglik(theta + step) - loglik(theta - step)) / (2.0 * h)
    return out


def cdf_by_quadrature(pdf, t):
    """Numerically integrated CDF at t > 0 for a density on (0, inf)."""
    val, _ = scipy.integrate.quad(pdf, 0.0, t, limit=200)
    return val


def cdf_beta_form(mu, phi, t):
    """Closed form CDF through the beta representation, as a cross check."""
    x = t / (1.0 + t)
    return sp.betainc(mu * (1.0 + phi), phi + 2.0, x)


def random_instance(rng, n=None, p=None, q=None):
    """A small random design and interior parameter point.

    Intercept plus optional uniform covariates; coefficients kept close
    enough to zero that mu and phi stay well inside the domain.
    """
    n = int(rng.integers(5, 9)) if n is None else n
    p = int(rng.integers(1, 3)) if p is None else p
    q = int(rng.integers(1, 3)) if q is None else q
    X = np.ones((n, p))
    Z = np.ones((n, q))
    if p > 1:
        X[:, 1:] = rng.uniform(-1.0, 1.0, (n, p - 1))
    if q > 1:
        Z[:, 1:] = rng.uniform(-1.0, 1.0, (n, q - 1))
    beta = np.concatenate([[rng.uniform(-0.3, 0.8)], rng.uniform(-0.5, 0.5, p - 1)])
    nu = np.concatenate([[rng.uniform(0.2, 1.2)], rng.uniform(-0.5, 0.5, q - 1)])
    mu = np.exp(X @ beta)
    phi = np.exp(Z @ nu)
    return X, Z, beta, nu, mu, phi
