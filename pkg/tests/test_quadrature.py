"""Gauss-Legendre drivers and monotone bisection."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from csreg import QuadratureError
from csreg.quadrature import (
    adaptive_gauss_legendre,
    bisect_monotone,
    fixed_gauss_legendre,
    piecewise_gauss_legendre,
)


def test_fixed_exact_for_polynomials():
    # n-point rule integrates degree 2n-1 exactly
    val = fixed_gauss_legendre(lambda x: x**7, 0.0, 1.0, n=4)
    assert val == pytest.approx(1.0 / 8.0, abs=1e-14)


def test_fixed_exp():
    val = fixed_gauss_legendre(np.exp, 0.0, 1.0, n=64)
    assert val == pytest.approx(math.e - 1.0, abs=1e-13)


@given(st.lists(st.floats(-2.0, 2.0), min_size=1, max_size=6))
@settings(max_examples=50, deadline=None)
def test_fixed_matches_monomial_sums(coeffs):
    poly = np.polynomial.Polynomial(coeffs)
    exact = poly.integ()(1.5) - poly.integ()(-0.5)
    assert fixed_gauss_legendre(poly, -0.5, 1.5, n=32) == pytest.approx(exact, abs=1e-10)


def test_piecewise_splits_kink():
    # |x| on [-1, 1] is exact once split at 0
    val = piecewise_gauss_legendre(np.abs, [-1.0, 0.0, 1.0], n=16)
    assert val == pytest.approx(1.0, abs=1e-14)


def test_piecewise_ignores_duplicate_points():
    val = piecewise_gauss_legendre(np.abs, [-1.0, 0.0, 0.0, 1.0], n=16)
    assert val == pytest.approx(1.0, abs=1e-14)


def test_adaptive_smooth():
    res = adaptive_gauss_legendre(np.exp, 0.0, 2.0, tol=1e-10)
    assert res.value == pytest.approx(math.exp(2.0) - 1.0, abs=1e-9)
    assert res.error <= 1e-10
    assert res.nodes >= 64


def test_adaptive_with_breakpoints():
    res = adaptive_gauss_legendre(
        lambda x: np.abs(x) ** 1.5, -1.0, 1.0, tol=1e-9, breakpoints=(0.0,)
    )
    assert res.value == pytest.approx(0.8, abs=1e-8)


def test_adaptive_raises_on_divergence():
    # inverse square root spike defeats fixed-order refinement
    with pytest.raises(QuadratureError):
        adaptive_gauss_legendre(
            lambda x: 1.0 / np.sqrt(np.abs(x - 0.3) + 1e-14), 0.0, 1.0, tol=1e-12
        )


def test_bisect_monotone_cubic():
    f = lambda x: x**3
    root = bisect_monotone(f, 2.0, 0.0, 2.0, tol=1e-12)
    assert root == pytest.approx(2.0 ** (1.0 / 3.0), abs=1e-11)


def test_bisect_monotone_linear_endpoints():
    assert bisect_monotone(lambda x: x, 0.0, 0.0, 1.0, tol=1e-12) == pytest.approx(
        0.0, abs=1e-11
    )
    assert bisect_monotone(lambda x: x, 1.0, 0.0, 1.0, tol=1e-12) == pytest.approx(
        1.0, abs=1e-11
    )
