"""Kernel backend parity and selection behavior."""

import os
import subprocess
import sys

import numpy as np
import pytest

from bpreg import _kernels

NAMES = ("lgamma", "digamma", "trigamma", "tetragamma")


def _grid():
    rng = np.random.default_rng(11)
    return np.concatenate(
        [
            rng.uniform(1e-5, 1.0, 300),
            rng.uniform(1.0, 10.0, 300),
            rng.uniform(10.0, 1e4, 300),
            np.array([1e-8, 0.5, 1.0, 9.999999, 10.0, 10.000001, 1e8]),
        ]
    )


@pytest.mark.skipif("c" not in _kernels.available_backends(), reason="no compiled kernels")
@pytest.mark.parametrize("name", NAMES)
def test_backend_agreement(name):
    z = _grid()
    prev = _kernels.active_backend()
    try:
        _kernels.use_backend("c")
        got_c = getattr(_kernels, name)(z)
        _kernels.use_backend("python")
        got_py = getattr(_kernels, name)(z)
    finally:
        _kernels.use_backend(prev)
    scale = np.maximum(1.0, np.abs(got_py))
    assert np.max(np.abs(got_c - got_py) / scale) <= 1e-13


def test_use_backend_rejects_unknown():
    with pytest.raises(ValueError):
        _kernels.use_backend("fortran")


def test_forced_backend_env(tmp_path):
    code = "import bpreg._kernels as k; print(k.active_backend())"
    env = dict(os.environ, BPREG_BACKEND="python")
    out = subprocess.run(
        [sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True
    )
    assert out.stdout.strip() == "python"


def test_unknown_backend_env_fails():
    code = "import bpreg._kernels"
    env = dict(os.environ, BPREG_BACKEND="rust")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert out.returncode != 0
    assert "BPREG_BACKEND" in out.stderr


def test_backends_report():
    names = _kernels.available_backends()
    assert "python" in names
    assert _kernels.active_backend() in names
