"""The beta prime distribution parameterized by mean and precision.

A variate Y ~ BP(mu, phi) arises as X / (1 - X) with
X ~ Beta(mu (1 + phi), phi + 2), giving E[Y] = mu and
Var[Y] = mu (1 + mu) / phi.  Random streams are NumPy ``Generator``
objects (PCG64 with a 64-bit seed); every stochastic operation takes the
stream explicitly so callers control seeding and splitting.
"""

from dataclasses import dataclass

import numpy as np

from . import special
from .exceptions import DomainError


@dataclass(frozen=True)
class BpParams:
    """Mean and precision of a beta prime variate.

    Parameters
    ----------
    mu : float
        Mean, mu > 0.
    phi : float
        Precision, phi > 0.  The variance is mu (1 + mu) / phi.
    """

    mu: float
    phi: float

    def __post_init__(self):
        mu = float(self.mu)
        phi = float(self.phi)
        if not (np.isfinite(mu) and mu > 0.0):
            raise DomainError(f"mu must be positive and finite, got {self.mu!r}")
        if not (np.isfinite(phi) and phi > 0.0):
            raise DomainError(f"phi must be positive and finite, got {self.phi!r}")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "phi", phi)

    @property
    def shape1(self):
        """First beta shape, mu (1 + phi)."""
        return self.mu * (1.0 + self.phi)

    @property
    def shape2(self):
        """Second beta shape, phi + 2."""
        return self.phi + 2.0


def log_pdf(params, y):
    """Log-density of BP(mu, phi) at y > 0.

    ln f(y) = (mu(1+phi) - 1) ln y - (mu(1+phi) + phi + 2) ln(1+y)
              - ln B(mu(1+phi), phi + 2).
    """
    arr = np.asarray(y, dtype=np.float64)
    if arr.size and (not np.all(np.isfinite(arr)) or np.any(arr <= 0.0)):
        raise DomainError("log_pdf requires y > 0 and finite")
    s1 = params.shape1
    s2 = params.shape2
    out = (s1 - 1.0) * np.log(arr) - (s1 + s2) * np.log1p(arr) - special.log_beta(s1, s2)
    if arr.ndim == 0:
        return float(out)
    return out


def pdf(params, y):
    """Density of BP(mu, phi) at y > 0."""
    return np.exp(log_pdf(params, y))


def moments(params):
    """Mean and variance, (mu, mu (1 + mu) / phi)."""
    mu = params.mu
    return mu, mu * (1.0 + mu) / params.phi


def sample_bp(mu, phi, rng, size=None):
    """Beta prime draws with elementwise parameters.

    ``mu`` and ``phi`` broadcast together; one draw is made per element of
    the broadcast shape (or ``size`` draws for scalar parameters).  The
    beta variate is formed from two gamma variates, X = G1 / (G1 + G2)
    with G1 ~ Gamma(mu(1+phi)) and G2 ~ Gamma(phi+2), and the result is
    X / (1 - X).  Degenerate draws (X numerically 0 or 1) are redrawn.
    """
    mu = np.asarray(mu, dtype=np.float64)
    phi = np.asarray(phi, dtype=np.float64)
    shape1, shape2 = np.broadcast_arrays(mu * (1.0 + phi), phi + 2.0)
    if size is not None:
        shape1 = np.broadcast_to(shape1, (size,) + shape1.shape)
        shape2 = np.broadcast_to(shape2, (size,) + shape2.shape)
    g1 = rng.standard_gamma(shape1)
    g2 = rng.standard_gamma(shape2)
    x = g1 / (g1 + g2)
    y = np.asarray(x / (1.0 - x))
    bad = ~np.isfinite(y) | (y <= 0.0)
    while bad.any():
        g1 = rng.standard_gamma(np.broadcast_to(shape1, y.shape)[bad])
        g2 = rng.standard_gamma(np.broadcast_to(shape2, y.shape)[bad])
        x = g1 / (g1 + g2)
        y[bad] = x / (1.0 - x)
        bad = ~np.isfinite(y) | (y <= 0.0)
    if y.ndim == 0:
        return float(y)
    return y


def sample(params, rng, count):
    """Draw ``count`` independent BP(mu, phi) variates from ``rng``.

    Deterministic given the state of ``rng``: the same seed yields the
    same vector.
    """
    count = int(count)
    if count < 1:
        raise ValueError("count must be a positive integer")
    return sample_bp(params.mu, params.phi, rng, size=count)
