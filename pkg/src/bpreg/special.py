"""Special functions on positive reals: log-gamma, psi, and its derivatives.

The heavy lifting happens in :mod:`bpreg._kernels`; this module owns input
validation and the scalar/array calling convention.  Scalars come back as
Python floats, arrays as float64 ndarrays of the input shape.
"""

import numpy as np

from . import _kernels
from .exceptions import DomainError


def _apply(kernel_name, x, fname):
    arr = np.asarray(x, dtype=np.float64)
    if arr.size:
        lo = arr.min()
        hi = arr.max()
        # lo > 0 rejects nonpositives and NaN, hi < inf rejects +inf
        if not (lo > 0.0 and hi < np.inf):
            raise DomainError(f"{fname} requires positive finite arguments")
    flat = np.ascontiguousarray(arr.reshape(-1))
    out = getattr(_kernels, kernel_name)(flat).reshape(arr.shape)
    if arr.ndim == 0:
        return float(out)
    return out


def log_gamma(x):
    """Natural log of the gamma function, ln Gamma(x), for x > 0."""
    return _apply("lgamma", x, "log_gamma")


def digamma(x):
    """psi(x) = d/dx ln Gamma(x), for x > 0."""
    return _apply("digamma", x, "digamma")


def trigamma(x):
    """psi'(x), the first derivative of the digamma function, for x > 0."""
    return _apply("trigamma", x, "trigamma")


def tetragamma(x):
    """psi''(x), the second derivative of the digamma function, for x > 0."""
    return _apply("tetragamma", x, "tetragamma")


def log_beta(a, b):
    """ln B(a, b) composed exactly as log_gamma(a) + log_gamma(b) - log_gamma(a + b)."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    return log_gamma(a) + log_gamma(b) - log_gamma(a + b)
