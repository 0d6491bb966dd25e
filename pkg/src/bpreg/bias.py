"""Second order bias machinery for the beta prime regression model.

The O(n^-1) bias of the MLE is assembled from cumulants of log-likelihood
derivatives.  Everything reduces to five scalar sequences a..e built from
psi' and psi'', six diagonal matrices M1..M6, and the diagonals P of the
design-weighted inverse information.  The bias has an equivalent pair of
forms, per block

    B_beta = K^bb X'[M1 P_bb + (M2 + M3) P_bn + M5 P_nn]
           + K^bn Z'[M2 P_bb + (M4 + M5) P_bn + M6 P_nn]
    B_nu   = (K^bn)' X'[...] + K^nn Z'[...]

and jointly B_theta = (Xtilde' Ktilde Xtilde)^-1 Xtilde' delta1 with
delta1 stacking the two bracketed vectors.  Both are computed on every
call and must agree; the redundancy is kept as a numerical self-check.

The Firth adjustment reuses the same vector: U*(theta) = U - Xtilde' delta1.
"""

from dataclasses import dataclass

import numpy as np

from . import model, special
from .exceptions import DomainError

_FORM_AGREEMENT = 1e-10


@dataclass(frozen=True)
class CumulantScalars:
    """The sequences a..e evaluated at (mu_i, phi_i).

    With alpha = mu (1 + phi) and tau = alpha + phi + 2:

    a = psi'(alpha) - psi'(tau)
    b = mu^2 psi'(alpha) - (1 + mu)^2 psi'(tau) + psi'(phi + 2)
    c = psi''(alpha) - psi''(tau)
    d = (1 + mu)^2 psi''(tau) - mu^2 psi''(alpha)
    e = (1 + mu)^3 psi''(tau) - mu^3 psi''(alpha) - psi''(phi + 2)

    At interior points a and b are positive (they are the information
    weights up to positive factors) while c is negative.
    """

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray
    e: np.ndarray


def cumulant_scalars(mu, phi):
    """Evaluate the scalar sequences a..e elementwise."""
    mu = np.asarray(mu, dtype=np.float64)
    phi = np.asarray(phi, dtype=np.float64)
    if not (
        np.all(np.isfinite(mu))
        and np.all(np.isfinite(phi))
        and np.all(mu > 0.0)
        and np.all(phi > 0.0)
    ):
        raise DomainError("cumulant_scalars requires finite positive mu and phi")
    alpha = mu * (1.0 + phi)
    tau = alpha + phi + 2.0
    psi1_alpha = special.trigamma(alpha)
    psi1_tau = special.trigamma(tau)
    psi2_alpha = special.tetragamma(alpha)
    psi2_tau = special.tetragamma(tau)
    a = psi1_alpha - psi1_tau
    b = mu**2 * psi1_alpha - (1.0 + mu) ** 2 * psi1_tau + special.trigamma(phi + 2.0)
    c = psi2_alpha - psi2_tau
    d = (1.0 + mu) ** 2 * psi2_tau - mu**2 * psi2_alpha
    e = (1.0 + mu) ** 3 * psi2_tau - mu**3 * psi2_alpha - special.tetragamma(phi + 2.0)
    return CumulantScalars(a=a, b=b, c=c, d=d, e=e)


def m_matrices(spec, params, cumulants=None):
    """Diagonals of the six M matrices at ``params``.

    Writing g = 1 + phi, t = psi'(tau) - a mu, and mu', mu'', phi', phi''
    for the link derivative hooks:

    m1 = -(g^2/2) [g c mu'^3 + a mu' mu'']
    m2 =  (g/2) t mu'' phi' - (g^2/2)(c mu - psi''(tau)) mu'^2 phi'
    m3 = -(g/2) {[2a + g(c mu - psi''(tau))] mu'^2 phi' + t mu'' phi'}
    m4 =  (1/2) {[g d + 2t] mu' phi'^2 - g t mu' phi''}
    m5 =  (g/2) [d mu' phi'^2 + t mu' phi'']
    m6 =  (1/2) [e phi'^3 - b phi' phi'']

    Returns the tuple (m1, m2, m3, m4, m5, m6) of n-vectors.
    """
    st = model.link_state(spec, params)
    mu, phi = st.mu, st.phi
    if cumulants is None:
        cumulants = cumulant_scalars(mu, phi)
    a, b, c, d, e = cumulants.a, cumulants.b, cumulants.c, cumulants.d, cumulants.e
    alpha = mu * (1.0 + phi)
    tau = alpha + phi + 2.0
    psi1_tau = special.trigamma(tau)
    psi2_tau = special.tetragamma(tau)
    g = 1.0 + phi
    t = psi1_tau - a * mu
    dmu, d2mu = st.dmu, st.d2mu
    dphi, d2phi = st.dphi, st.d2phi
    m1 = -0.5 * g**2 * (g * c * dmu**3 + a * dmu * d2mu)
    m2 = 0.5 * g * t * d2mu * dphi - 0.5 * g**2 * (c * mu - psi2_tau) * dmu**2 * dphi
    m3 = -0.5 * g * ((2.0 * a + g * (c * mu - psi2_tau)) * dmu**2 * dphi + t * d2mu * dphi)
    m4 = 0.5 * ((g * d + 2.0 * t) * dmu * dphi**2 - g * t * dmu * d2phi)
    m5 = 0.5 * g * (d * dmu * dphi**2 + t * dmu * d2phi)
    m6 = 0.5 * (e * dphi**3 - b * dphi * d2phi)
    return m1, m2, m3, m4, m5, m6


@dataclass(frozen=True)
class BiasWorkspace:
    """Intermediate quantities behind one bias evaluation.

    ``P_bb``, ``P_bn`` and ``P_nn`` are the diagonals of X K^bb X',
    X K^bn Z' and Z K^nn Z' where K^bb, K^bn, K^nn are the blocks of the
    partitioned inverse information.  ``delta1`` is the stacked 2n vector
    entering both the bias and the Firth adjustment.
    """

    M1: np.ndarray
    M2: np.ndarray
    M3: np.ndarray
    M4: np.ndarray
    M5: np.ndarray
    M6: np.ndarray
    P_bb: np.ndarray
    P_bn: np.ndarray
    P_nn: np.ndarray
    delta1: np.ndarray
    Kinv_bb: np.ndarray
    Kinv_bn: np.ndarray
    Kinv_nn: np.ndarray
    K: np.ndarray


def build_workspace(spec, params):
    """Evaluate every Appendix-level intermediate at ``params``."""
    info = model.expected_information(spec, params)
    kinv = model.information_inverse(info.K)
    p = spec.p
    kinv_bb = kinv[:p, :p]
    kinv_bn = kinv[:p, p:]
    kinv_nn = kinv[p:, p:]
    X, Z = spec.X, spec.Z
    p_bb = np.einsum("ij,jk,ik->i", X, kinv_bb, X)
    p_bn = np.einsum("ij,jk,ik->i", X, kinv_bn, Z)
    p_nn = np.einsum("ij,jk,ik->i", Z, kinv_nn, Z)
    m1, m2, m3, m4, m5, m6 = m_matrices(spec, params)
    top = m1 * p_bb + (m2 + m3) * p_bn + m5 * p_nn
    bottom = m2 * p_bb + (m4 + m5) * p_bn + m6 * p_nn
    delta1 = np.concatenate([top, bottom])
    return BiasWorkspace(
        M1=m1,
        M2=m2,
        M3=m3,
        M4=m4,
        M5=m5,
        M6=m6,
        P_bb=p_bb,
        P_bn=p_bn,
        P_nn=p_nn,
        delta1=delta1,
        Kinv_bb=kinv_bb,
        Kinv_bn=kinv_bn,
        Kinv_nn=kinv_nn,
        K=info.K,
    )


@dataclass(frozen=True)
class BiasResult:
    """Second order bias of the MLE, per block and joint."""

    bias_beta: np.ndarray
    bias_nu: np.ndarray
    joint: np.ndarray


def _design_projected_delta1(spec, ws):
    """Xtilde' delta1 as the pair (X' top, Z' bottom) concatenated."""
    n = spec.n
    top = ws.delta1[:n]
    bottom = ws.delta1[n:]
    return np.concatenate([spec.X.T @ top, spec.Z.T @ bottom])


def cox_snell_bias(spec, params, workspace=None):
    """O(n^-1) bias of the MLE evaluated at ``params``.

    Both the per-block expressions and the joint solve
    (Xtilde' Ktilde Xtilde)^-1 Xtilde' delta1 are computed; a disagreement
    beyond 1e-10 (scaled) raises ``ArithmeticError`` since the two are
    algebraically identical.
    """
    ws = build_workspace(spec, params) if workspace is None else workspace
    n = spec.n
    top = ws.delta1[:n]
    bottom = ws.delta1[n:]
    xt_top = spec.X.T @ top
    zt_bottom = spec.Z.T @ bottom
    bias_beta = ws.Kinv_bb @ xt_top + ws.Kinv_bn @ zt_bottom
    bias_nu = ws.Kinv_bn.T @ xt_top + ws.Kinv_nn @ zt_bottom
    joint = model.cholesky_solve(ws.K, np.concatenate([xt_top, zt_bottom]))
    block = np.concatenate([bias_beta, bias_nu])
    scale = 1.0 + np.max(np.abs(joint))
    if np.max(np.abs(block - joint)) > _FORM_AGREEMENT * scale:
        raise ArithmeticError("block and joint bias forms disagree beyond tolerance")
    return BiasResult(bias_beta=bias_beta, bias_nu=bias_nu, joint=joint)


def corrected_estimate(theta_hat, spec):
    """Corrective (Cox-Snell) estimator: theta_hat minus the bias at theta_hat."""
    result = cox_snell_bias(spec, theta_hat)
    adjusted = theta_hat.theta - result.joint
    return model.ParamVector.from_theta(adjusted, spec.p, spec.q)


def modified_score_state(spec, params):
    """U*(theta) together with the workspace behind it.

    The workspace carries the information matrix already evaluated at
    ``params``, which the scoring iteration reuses for its step direction
    instead of assembling K a second time.
    """
    ws = build_workspace(spec, params)
    ustar = model.score(spec, params) - _design_projected_delta1(spec, ws)
    return ustar, ws


def modified_score(spec, params):
    """Firth modified score U*(theta) = U(theta) - Xtilde' delta1.

    Equals U - K B with B the joint bias, since
    B = K^-1 Xtilde' delta1.  The root of U* is the preventive
    bias-corrected estimator.
    """
    return modified_score_state(spec, params)[0]
