"""Polygamma and log-gamma kernels against anchors, scipy, and mpmath."""

import mpmath
import numpy as np
import pytest
import scipy.special as sp
from hypothesis import given
from hypothesis import strategies as st

from bpreg import special
from bpreg.exceptions import DomainError

FUNCS = {
    "log_gamma": (special.log_gamma, sp.gammaln, lambda z: mpmath.loggamma(z)),
    "digamma": (special.digamma, sp.digamma, lambda z: mpmath.digamma(z)),
    "trigamma": (
        special.trigamma,
        lambda z: sp.polygamma(1, z),
        lambda z: mpmath.polygamma(1, z),
    ),
    "tetragamma": (
        special.tetragamma,
        lambda z: sp.polygamma(2, z),
        lambda z: mpmath.polygamma(2, z),
    ),
}


def test_closed_form_anchors():
    euler = 0.5772156649015329
    assert special.log_gamma(1.0) == pytest.approx(0.0, abs=1e-12)
    assert special.log_gamma(0.5) == pytest.approx(0.5 * np.log(np.pi), abs=1e-12)
    assert special.digamma(1.0) == pytest.approx(-euler, abs=1e-12)
    assert special.trigamma(1.0) == pytest.approx(np.pi**2 / 6.0, abs=1e-10)
    assert special.tetragamma(1.0) == pytest.approx(-2.0 * 1.2020569031595943, abs=1e-10)


def test_half_integer_anchors():
    assert special.trigamma(0.5) == pytest.approx(np.pi**2 / 2.0, rel=1e-12)
    assert special.digamma(2.0) == pytest.approx(1.0 - 0.5772156649015329, rel=1e-12)


@pytest.mark.parametrize("name", sorted(FUNCS))
def test_against_scipy_sweep(name):
    ours, scipy_fn, _ = FUNCS[name]
    z = np.concatenate(
        [
            np.linspace(1e-3, 0.99, 40),
            np.linspace(1.0, 9.5, 40),
            np.linspace(10.0, 95.0, 30),
            np.geomspace(100.0, 1e6, 20),
        ]
    )
    got = ours(z)
    want = scipy_fn(z)
    assert np.allclose(got, want, rtol=5e-13, atol=5e-13)


@pytest.mark.parametrize("name", sorted(FUNCS))
def test_against_mpmath_spotchecks(name):
    ours, _, mp_fn = FUNCS[name]
    mpmath.mp.dps = 40
    for z in (0.013, 0.4, 1.7, 6.3, 11.0, 47.5, 311.0, 1e5):
        want = float(mp_fn(mpmath.mpf(z)))
        got = ours(z)
        scale = max(1.0, abs(want))
        assert abs(got - want) < 1e-12 * scale, (name, z)


def test_recurrence_identities_fixed_seed():
    rng = np.random.default_rng(20260822)
    z = rng.uniform(1e-6, 100.0, 1000)
    assert np.all(np.abs(special.log_gamma(z + 1.0) - special.log_gamma(z) - np.log(z)) <= 1e-10)
    assert np.all(np.abs(special.digamma(z + 1.0) - special.digamma(z) - 1.0 / z) <= 1e-10)
    assert np.all(np.abs(special.trigamma(z + 1.0) - special.trigamma(z) + 1.0 / z**2) <= 1e-10)
    assert np.all(
        np.abs(special.tetragamma(z + 1.0) - special.tetragamma(z) - 2.0 / z**3) <= 1e-10
    )


def test_reflection_digamma():
    # psi(1-z) - psi(z) = pi cot(pi z) on (0, 1)
    z = np.linspace(0.05, 0.95, 19)
    lhs = special.digamma(1.0 - z) - special.digamma(z)
    rhs = np.pi / np.tan(np.pi * z)
    assert np.allclose(lhs, rhs, rtol=1e-10, atol=1e-9)


@given(st.floats(min_value=1e-5, max_value=1e5))
def test_trigamma_positive_decreasing(z):
    v = special.trigamma(z)
    assert v > 0.0
    assert special.trigamma(z * 1.5 + 0.5) < v


@given(st.floats(min_value=1e-5, max_value=1e5))
def test_tetragamma_negative(z):
    assert special.tetragamma(z) < 0.0


def test_scalar_and_array_conventions():
    v = special.digamma(2.5)
    assert isinstance(v, float)
    arr = special.digamma(np.array([[1.0, 2.0], [3.0, 4.0]]))
    assert arr.shape == (2, 2)
    assert arr.dtype == np.float64


def test_log_beta_symmetry_and_value():
    assert special.log_beta(2.0, 3.0) == pytest.approx(np.log(1.0 / 12.0), rel=1e-12)
    assert special.log_beta(4.7, 0.9) == pytest.approx(special.log_beta(0.9, 4.7), rel=1e-14)


@pytest.mark.parametrize("bad", [0.0, -1.0, np.inf, np.nan])
@pytest.mark.parametrize("name", sorted(FUNCS))
def test_domain_errors(name, bad):
    ours, _, _ = FUNCS[name]
    with pytest.raises(DomainError):
        ours(bad)
    with pytest.raises(DomainError):
        ours(np.array([1.0, bad, 2.0]))
