import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vdclab.growth import (DomainError, ThresholdError, compare_to_int, derivative,
                           detect_threshold, evaluate, in_theorem_range, inverse,
                           make_function, with_threshold)

CATALOG = [
    ("pure", 1.1, {}),
    ("powlog", 1.05, {"A": 1.0}),
    ("powlog", 1.1, {"A": -0.5}),
    ("subexp", 1.1, {"A": 0.5, "B": 0.5}),
    ("iterlog", 1.1, {"m": 1}),
    ("iterlog", 1.05, {"m": 2}),
]


def mp_h(kind, c, params, t):
    """Independent oracle for h(t) at the caller's working precision."""
    t = mpmath.mpf(t)
    p = t ** mpmath.mpf(repr(c))
    if kind == "pure":
        return p
    if kind == "powlog":
        return p * mpmath.log(t) ** params["A"]
    if kind == "subexp":
        return p * mpmath.exp(params["A"] * mpmath.log(t) ** params["B"])
    x = t
    for _ in range(params["m"]):
        x = mpmath.log(x)
    return p * x


def test_pure_examples(f11):
    assert evaluate(f11, 1.0) == 1.0
    assert evaluate(f11, 1024.0) == pytest.approx(2048.0, rel=1e-15)
    assert math.floor(evaluate(f11, 6.0)) == 7
    assert evaluate(f11, 6.0) == pytest.approx(float(mpmath.power(6, mpmath.mpf("1.1"))), rel=1e-14)
    assert derivative(f11, 1, 1.0) == pytest.approx(1.1)
    assert derivative(f11, 2, 1.0) == pytest.approx(0.11)
    assert derivative(f11, 1, 1024.0) == pytest.approx(2.2, rel=1e-14)
    assert inverse(f11, 2048.0) == pytest.approx(1024.0, rel=1e-14)
    assert inverse(make_function("pure", 1.17), 1.0) == 1.0


def test_derivative_order_rejected(f11):
    with pytest.raises(ValueError):
        derivative(f11, 3, 2.0)


@pytest.mark.parametrize("kind,c,params", CATALOG)
def test_values_against_mpmath(kind, c, params):
    f = make_function(kind, c, **params)
    t = np.array([f.base + 0.5, 37.0, 1e3, 123456.7, 1e9]) + f.base
    got = f.value(t)
    with mpmath.workdps(40):
        want = np.array([float(mp_h(kind, c, params, x)) for x in t])
    np.testing.assert_allclose(got, want, rtol=1e-12)


@pytest.mark.parametrize("kind,c,params", CATALOG)
def test_derivatives_match_mpmath(kind, c, params):
    f = make_function(kind, c, **params)
    for t in (f.base + 3.0, 500.0 + f.base, 2.5e5):
        for order in (1, 2):
            with mpmath.workdps(40):
                want = float(mpmath.diff(lambda x: mp_h(kind, c, params, x), t, order))
            assert f.derivative(t, order) == pytest.approx(want, rel=1e-9)


@pytest.mark.parametrize("kind,c,params", CATALOG)
def test_central_differences(kind, c, params):
    f = make_function(kind, c, **params)
    t = np.geomspace(f.base + 10, 1e6, 25)
    step = 1e-4 * t
    fd = (f.value(t + step) - f.value(t - step)) / (2 * step)
    np.testing.assert_allclose(fd, f.derivative(t, 1), rtol=1e-6)


@pytest.mark.parametrize("kind,c,params", CATALOG)
def test_inverse_round_trip(kind, c, params):
    f = make_function(kind, c, **params)
    t = np.geomspace(f.base + 1, 1e8, 200)
    np.testing.assert_allclose(f.inverse(f.value(t)), t, rtol=1e-10)


def test_inverse_composite_example():
    f = make_function("powlog", 1.05, A=1.0)
    v = inverse(f, 1e6)
    assert abs(float(f.value(v)) - 1e6) <= 1e-4


def test_inverse_below_range():
    f = make_function("powlog", 1.05, A=1.0)
    with pytest.raises(DomainError):
        f.inverse(0.5)


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=1.01, max_value=1.19), st.floats(min_value=1.0, max_value=1e9))
def test_monotone_and_inverse_property(c, t):
    f = make_function("pure", c)
    assert f.value(t * 1.001) > f.value(t)
    assert f.inverse(f.value(t)) == pytest.approx(t, rel=1e-10)


@pytest.mark.parametrize("kind,c,params,burn", [
    ("pure", 1.1, {}, 2.0), ("powlog", 1.1, {"A": 1.0}, 1e40),
    ("subexp", 1.1, {"A": 0.5, "B": 0.5}, 1e44), ("iterlog", 1.1, {"m": 2}, 1e10)])
def test_growth_rate_sandwich(kind, c, params, burn):
    # burn-in: where the slowly varying factor sits between t^-0.05 and t^0.05
    f = make_function(kind, c, **params)
    t = np.geomspace(burn, burn * 1e20, 100)
    h = f.value(t)
    assert np.all(t ** (c - 0.05) <= h) and np.all(h <= t ** (c + 0.05))


def test_compare_to_int_exact_ties():
    f = make_function("pure", 1.5)
    assert compare_to_int(f, 4, 8) == 0
    assert compare_to_int(f, 9, 27) == 0
    assert compare_to_int(f, 4, 7) == 1
    assert compare_to_int(f, 4, 9) == -1
    g = make_function("pure", 1.1)
    assert compare_to_int(g, 1024, 2048) == 0
    assert compare_to_int(g, 1023, 2045) == 1
    assert compare_to_int(g, 1023, 2046) == -1


@pytest.mark.parametrize("c", [1.1, 1.19])
def test_threshold_properties(c):
    f = make_function("pure", c)
    T = detect_threshold(f, 10**6)
    assert 1 <= T < 10**6
    t = np.arange(T, 10**6, 97, dtype=float)
    assert np.all(f.derivative(t, 1) > 1)
    n = np.arange(math.ceil(f.value(T)), 10**6 + 1, dtype=float)
    assert np.all(np.diff(f.inverse(n)) < 0.5)
    # the scan is tight: one step earlier the spacing condition fails
    if T > 1:
        n0 = math.ceil(f.value(T - 1))
        assert f.inverse(n0 + 1.0) - f.inverse(float(n0)) >= 0.5 or f.derivative(T - 1, 1) <= 1


def test_threshold_failure_path():
    with pytest.raises(ThresholdError):
        detect_threshold(make_function("powlog", 1.05, A=-2.0), 10)


def test_with_threshold_and_range():
    f = with_threshold(make_function("pure", 1.1))
    assert f.threshold == detect_threshold(make_function("pure", 1.1))
    assert in_theorem_range(1.1) and not in_theorem_range(1.2) and not in_theorem_range(1.0)


def test_rejects_bad_parameters():
    with pytest.raises(ValueError):
        make_function("pure", 1.0)
    with pytest.raises(ValueError):
        make_function("subexp", 1.1, A=1.0, B=1.5)
    with pytest.raises(ValueError):
        make_function("cubic", 1.1)
