import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.interpolate import BSpline

from mimetic_pic.splines import (
    MAX_DEGREE, spline_antiderivative, spline_tables, spline_value,
)

DEGREES = list(range(MAX_DEGREE + 1))


def _scipy_bspline(p):
    knots = np.arange(p + 2) - (p + 1) / 2.0
    return BSpline.basis_element(knots, extrapolate=False)


@pytest.mark.parametrize("p", DEGREES)
def test_matches_scipy_bspline(p, rng):
    ref = _scipy_bspline(p)
    u = rng.uniform(-(p + 1) / 2 - 1, (p + 1) / 2 + 1, size=500)
    mine = spline_value(p, u)
    theirs = np.nan_to_num(ref(u))
    assert np.allclose(mine, theirs, atol=1e-13)


@pytest.mark.parametrize("p", DEGREES)
def test_support_and_positivity(p):
    half = (p + 1) / 2.0
    u = np.linspace(-half + 1e-4, half - 1e-4, 101)
    assert np.all(spline_value(p, u) > 0.0)
    assert spline_value(p, np.array([half + 0.1, -half - 0.1])).max() == 0.0


@given(st.integers(0, MAX_DEGREE), st.floats(-10, 10))
def test_partition_of_unity(p, x):
    shifts = np.arange(-12, 13)
    assert np.isclose(spline_value(p, x - shifts).sum(), 1.0, atol=1e-12)


@pytest.mark.parametrize("p", DEGREES)
def test_antiderivative_consistency(p, rng):
    # A(u) matches the numerically accumulated integral of B_p
    u = np.sort(rng.uniform(-(p + 1) / 2, (p + 1) / 2, size=40))
    a = spline_antiderivative(p, u)
    for lo, hi, alo, ahi in zip(u[:-1], u[1:], a[:-1], a[1:]):
        grid = np.linspace(lo, hi, 201)
        quad = np.trapezoid(spline_value(p, grid), grid)
        assert np.isclose(ahi - alo, quad, atol=5e-6)
    assert np.isclose(spline_antiderivative(p, (p + 1) / 2.0), 1.0)
    assert spline_antiderivative(p, -(p + 1) / 2.0) == 0.0


@pytest.mark.parametrize("p", DEGREES)
def test_antiderivative_monotone_clamped(p):
    u = np.linspace(-p - 2, p + 2, 400)
    a = spline_antiderivative(p, u)
    assert np.all(np.diff(a) >= -1e-15)
    assert np.all((a >= 0.0) & (a <= 1.0))


def test_left_open_piece_convention():
    # at interior knots the left piece's endpoint value is used; for p = 0
    # the jump points u = +-1/2 belong to the left-closed side of the cell
    assert spline_value(0, -0.5) == 0.0
    assert spline_value(0, 0.5) == 1.0
    # continuity at knots for p >= 1
    for p in range(1, MAX_DEGREE + 1):
        knots = np.arange(p + 2) - (p + 1) / 2.0
        eps = 1e-9
        left = spline_value(p, knots - eps)
        at = spline_value(p, knots)
        assert np.allclose(left, at, atol=1e-7)


def test_tables_shapes_and_degree_guard():
    for p in DEGREES:
        bc, ac = spline_tables(p)
        assert bc.shape == (p + 1, p + 1)
        assert ac.shape == (p + 1, p + 3)
    with pytest.raises(ValueError):
        spline_tables(MAX_DEGREE + 1)
    with pytest.raises(ValueError):
        spline_tables(-1)
