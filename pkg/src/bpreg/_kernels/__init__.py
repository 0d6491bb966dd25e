"""Kernel backend selection.

Two interchangeable implementations of the polygamma kernels exist: a
compiled Cython extension (``_core``) and a NumPy reference (``_ref``).
The compiled one is preferred when it imported cleanly; the environment
variable ``BPREG_BACKEND`` forces the choice (``c`` or ``python``).

All kernels take a 1-d contiguous float64 array of positive values and
return a new float64 array of the same length.
"""

import os

from . import _ref

_BACKENDS = {"python": _ref}

try:
    from . import _core

    _BACKENDS["c"] = _core
except ImportError:
    _core = None

_forced = os.environ.get("BPREG_BACKEND", "").strip().lower()
if _forced in ("python", "ref"):
    _active = "python"
elif _forced in ("c", "cython"):
    if "c" not in _BACKENDS:
        raise ImportError(
            "BPREG_BACKEND requested the compiled backend but "
            "bpreg._kernels._core is not importable"
        )
    _active = "c"
elif _forced:
    raise ValueError(f"unknown BPREG_BACKEND value: {_forced!r}")
else:
    _active = "c" if "c" in _BACKENDS else "python"


def available_backends():
    """Names of the importable kernel backends."""
    return tuple(sorted(_BACKENDS))


def active_backend():
    """Name of the backend currently answering kernel calls."""
    return _active


def use_backend(name):
    """Switch the active backend at runtime (used by tests and benchmarks)."""
    global _active, lgamma, digamma, trigamma, tetragamma
    if name not in _BACKENDS:
        raise ValueError(f"backend {name!r} not available; have {available_backends()}")
    mod = _BACKENDS[name]
    _active = name
    lgamma = mod.lgamma
    digamma = mod.digamma
    trigamma = mod.trigamma
    tetragamma = mod.tetragamma


use_backend(_active)
