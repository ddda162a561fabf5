"""Quadrature and piecewise-function substrate."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from extremal_means.piecewise import (
    ClosedFormSegment,
    ConstantSegment,
    PiecewiseFunction,
    QuadratureError,
    SampledSegment,
    integrate,
    integrate_callable,
    simpson_fixed,
)


def test_simpson_fixed_exact_on_cubics():
    # Simpson integrates degree <= 3 exactly, any panel count
    fn = lambda x: 2.0 * x**3 - x**2 + 3.0 * x - 5.0
    exact = (2 / 4) * (2.0**4 - 1.0) - (1 / 3) * (2.0**3 - 1.0) + (3 / 2) * (2.0**2 - 1.0) - 5.0
    for panels in (1, 2, 7):
        assert abs(simpson_fixed(fn, 1.0, 2.0, panels) - exact) < 1e-12


def test_simpson_fixed_rejects_zero_panels():
    with pytest.raises(ValueError):
        simpson_fixed(np.sin, 0.0, 1.0, 0)


def test_integrate_callable_known_integrals():
    r = integrate_callable(np.sin, 0.0, np.pi, tol=1e-12)
    assert abs(r.value - 2.0) < 1e-11
    assert r.evaluations > 0
    r = integrate_callable(lambda x: 1.0 / x, 1.0, np.e, tol=1e-12)
    assert abs(r.value - 1.0) < 1e-11


def test_integrate_callable_breakpoint_kink():
    # |x - 0.5| has a kink; splitting there keeps each half smooth
    fn = lambda x: np.abs(x - 0.5)
    r = integrate_callable(fn, 0.0, 1.0, tol=1e-12, breakpoints=(0.5,))
    assert abs(r.value - 0.25) < 1e-12


def test_integrate_callable_empty_and_invalid_ranges():
    assert integrate_callable(np.sin, 1.0, 1.0).value == 0.0
    with pytest.raises(ValueError):
        integrate_callable(np.sin, 2.0, 1.0)


def test_integrate_callable_nonconvergent_raises():
    # a jump at an off-grid point defeats the halving rule at 1e-14
    fn = lambda x: np.sign(x - 1.0 / 3.0)
    with pytest.raises(QuadratureError):
        integrate_callable(fn, 0.0, 1.0, tol=1e-14)


@settings(max_examples=30, deadline=None)
@given(
    st.tuples(*(st.floats(-3.0, 3.0) for _ in range(4))),
    st.floats(0.1, 2.5),
)
def test_integrate_callable_matches_antiderivative(coeffs, width):
    c0, c1, c2, c3 = coeffs
    fn = lambda x: c0 + c1 * x + c2 * x**2 + c3 * x**3
    F = lambda x: c0 * x + c1 * x**2 / 2 + c2 * x**3 / 3 + c3 * x**4 / 4
    r = integrate_callable(fn, 0.5, 0.5 + width, tol=1e-12)
    scale = max(1.0, abs(r.value))
    assert abs(r.value - (F(0.5 + width) - F(0.5))) < 1e-10 * scale


def _mixed_profile() -> PiecewiseFunction:
    return PiecewiseFunction(
        breakpoints=(0.0, 1.0, 2.0),
        segments=(
            ConstantSegment(1.0),
            ConstantSegment(-0.5),
            ClosedFormSegment(lambda t: t**2, name="square"),
        ),
        domain_end=4.0,
    )


def test_piecewise_eval_right_continuous_at_jumps():
    f = _mixed_profile()
    assert f.eval(0.0) == 1.0
    assert f.eval(1.0) == -0.5  # right limit owns the breakpoint
    assert f.eval_left(1.0) == 1.0
    assert abs(f.eval(2.5) - 6.25) < 1e-15
    got = f.eval_array(np.array([0.5, 1.0, 1.5, 3.0]))
    assert np.allclose(got, [1.0, -0.5, -0.5, 9.0])


def test_piecewise_domain_errors():
    f = _mixed_profile()
    with pytest.raises(ValueError):
        f.eval(-0.01)
    with pytest.raises(ValueError):
        f.eval(4.0)  # domain is half-open


def test_piecewise_validation():
    with pytest.raises(ValueError):
        PiecewiseFunction(breakpoints=(0.5, 1.0), segments=(ConstantSegment(1),) * 2)
    with pytest.raises(ValueError):
        PiecewiseFunction(breakpoints=(0.0, 1.0, 1.0), segments=(ConstantSegment(1),) * 3)
    with pytest.raises(ValueError):
        PiecewiseFunction(breakpoints=(0.0, 1.0), segments=(ConstantSegment(1),))


def test_integrate_mixed_piecewise():
    f = _mixed_profile()
    r = integrate(f, 0.5, 2.5)
    exact = 0.5 * 1.0 + 1.0 * (-0.5) + (2.5**3 - 2.0**3) / 3.0
    assert abs(r.value - exact) < 1e-10
    assert integrate(f, 1.3, 1.3).value == 0.0
    with pytest.raises(ValueError):
        integrate(f, 2.0, 1.0)


def test_sampled_segment_linear_exact():
    # linear data reproduces exactly under linear interpolation
    h = 0.25
    xs = 1.0 + h * np.arange(9)
    seg = SampledSegment(start=1.0, h=h, samples=3.0 * xs - 1.0)
    probe = np.array([1.0, 1.1, 2.03, 2.999])
    assert np.allclose(seg.values(probe), 3.0 * probe - 1.0, atol=1e-13)
    # exact integral of the interpolant = analytic integral for linear data
    a, b = 1.1, 2.9
    exact = 1.5 * (b**2 - a**2) - (b - a)
    assert abs(seg.exact_integral(a, b) - exact) < 1e-12


@settings(max_examples=40, deadline=None)
@given(
    st.lists(st.floats(-5.0, 5.0), min_size=3, max_size=9),
    st.floats(0.0, 1.0),
    st.floats(0.0, 1.0),
)
def test_sampled_exact_integral_matches_dense_trapezoid(samples, fa, fb):
    h = 0.5
    seg = SampledSegment(start=0.0, h=h, samples=np.asarray(samples))
    top = (len(samples) - 1) * h
    a = fa * top
    b = a + fb * (top - a)
    xs = np.linspace(a, b, 4001)
    dense = np.trapezoid(seg.values(xs), xs) if b > a else 0.0
    # dense grid carries O(h^2) kink error ~1e-6; the bug class this
    # guards against (mis-assembled partial cells) is O(1)
    assert abs(seg.exact_integral(a, b) - dense) < 1e-5


def test_integrate_sampled_segment_no_estimated_error():
    seg = SampledSegment(start=0.0, h=0.5, samples=np.array([0.0, 1.0, 0.0, 1.0]))
    f = PiecewiseFunction(breakpoints=(0.0,), segments=(seg,), domain_end=1.5)
    r = integrate(f, 0.0, 1.5)
    assert abs(r.value - 0.75) < 1e-14
    assert r.est_error == 0.0
