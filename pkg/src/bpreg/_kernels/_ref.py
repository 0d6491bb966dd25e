"""NumPy reference implementations of the polygamma kernels.

Every function maps a 1-d float64 array elementwise.  Arguments below 10 are
shifted upward with the recurrence of the corresponding function, then a
Bernoulli-number asymptotic expansion is evaluated at the shifted point.
Inputs are assumed positive and finite; validation happens in the caller.
"""

import numpy as np

_SHIFT = 10.0
_HALF_LN_TWO_PI = 0.9189385332046727417803297

# B(2k) / (2k(2k-1)), k = 1..8: Stirling series for log gamma.
_LGAMMA_COEF = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
)

# B(2k) / (2k), k = 1..7: psi(z) ~ ln z - 1/(2z) - sum c_k z^(-2k).
_DIGAMMA_COEF = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
)

# B(2k), k = 1..7: psi'(z) ~ 1/z + 1/(2z^2) + (1/z) sum c_k z^(-2k).
_TRIGAMMA_COEF = (
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
)

# B(2k)(2k+1), k = 1..6: psi''(z) ~ -[1/z^2 + 1/z^3 + (1/z^2) sum c_k z^(-2k)].
_TETRAGAMMA_COEF = (
    1.0 / 2.0,
    -1.0 / 6.0,
    1.0 / 6.0,
    -3.0 / 10.0,
    5.0 / 6.0,
    -8983.0 / 2730.0,
)


def _ascending(w, coef):
    # c1 + w c2 + w^2 c3 + ... evaluated by Horner.
    s = np.zeros_like(w)
    for c in reversed(coef):
        s = s * w + c
    return s


def _shift(x, term):
    """Accumulate recurrence terms while pushing arguments above _SHIFT."""
    z = x.copy()
    acc = np.zeros_like(z)
    while True:
        mask = z < _SHIFT
        if not mask.any():
            break
        zm = z[mask]
        acc[mask] += term(zm)
        z[mask] = zm + 1.0
    return z, acc


def lgamma(x):
    z, acc = _shift(x, np.log)
    r = 1.0 / z
    w = r * r
    series = (z - 0.5) * np.log(z) - z + _HALF_LN_TWO_PI + r * _ascending(w, _LGAMMA_COEF)
    return series - acc


def digamma(x):
    z, acc = _shift(x, lambda t: 1.0 / t)
    r = 1.0 / z
    w = r * r
    series = np.log(z) - 0.5 * r - w * _ascending(w, _DIGAMMA_COEF)
    return series - acc


def trigamma(x):
    z, acc = _shift(x, lambda t: 1.0 / (t * t))
    r = 1.0 / z
    w = r * r
    series = r + 0.5 * w + r * w * _ascending(w, _TRIGAMMA_COEF)
    return series + acc


def tetragamma(x):
    z, acc = _shift(x, lambda t: 2.0 / (t * t * t))
    r = 1.0 / z
    w = r * r
    series = -(w + w * r + w * w * _ascending(w, _TETRAGAMMA_COEF))
    return series - acc
