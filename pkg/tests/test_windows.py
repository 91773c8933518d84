import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import bspline_truncated_powers, exp_bspline_by_quadrature
from splinegabor.errors import DegenerateRatesError, InvalidOrderError, InvalidParameterError
from splinegabor.grid import Grid
from splinegabor.windows import (
    ExpSplineParams,
    PiecewiseWindow,
    SampledWindow,
    bspline_by_convolution,
    bspline_window,
    eval_bspline,
    eval_exp_bspline_general,
    eval_exp_bspline_raw,
    exp_bspline_general_window,
    exp_bspline_raw_window,
    generator_window,
    linear_combination,
    normalize_exp_bspline,
    partition_of_unity_residual,
    recenter,
)

# frozen from nested scipy quadrature of the defining convolution (tests/oracles.py)
EPS3_RAW_P1_AT_1_5 = 0.830909339217726
EPS3_P1_AT_1_5 = 0.7649962877984051


@pytest.mark.parametrize("order, x, expected", [
    (2, 0.5, 0.5),
    (3, 0.0, 0.75),
    (3, 1.5, 0.0),
    (1, 0.4, 1.0),
    (2, -1.0, 0.0),
    (2, 0.0, 1.0),
    (3, -1.0, 0.125),
    (4, 0.0, 2 / 3),
])
def test_bspline_values(order, x, expected):
    assert eval_bspline(order, x) == pytest.approx(expected, abs=1e-14)


def test_bspline_order_zero_rejected():
    with pytest.raises(InvalidOrderError):
        eval_bspline(0, 0.0)


@pytest.mark.parametrize("order", [1, 2, 3, 4, 5, 6, 7])
def test_bspline_matches_truncated_powers(order):
    x = np.random.default_rng(order).uniform(-order / 2 - 0.5, order / 2 + 0.5, 10_000)
    assert np.max(np.abs(eval_bspline(order, x) - bspline_truncated_powers(order, x))) < 1e-12


@pytest.mark.parametrize("order", [2, 3])
def test_closed_forms_agree_with_exact_convolution(order):
    pieces = bspline_by_convolution(order)
    knots = np.arange(order + 1) - order / 2
    conv = PiecewiseWindow(knots, [{(0.0, k): float(c) for k, c in enumerate(p)} for p in pieces])
    x = np.linspace(-order / 2, order / 2, 4001)
    assert np.max(np.abs(conv(x) - bspline_window(order)(x))) < 1e-12


@pytest.mark.parametrize("order", [2, 3, 4, 5])
def test_bspline_symmetric_nonnegative_continuous(order):
    w = bspline_window(order)
    x = np.linspace(-order, order, 2001)
    assert np.max(np.abs(w(x) - w(-x))) < 1e-12
    assert np.all(w(x) >= 0)
    assert np.max(w.knot_jumps()) < 1e-10
    assert w.support == (-order / 2, order / 2)


@pytest.mark.parametrize("x, expected", [(0.0, 0.0), (1.5, EPS3_RAW_P1_AT_1_5), (3.1, 0.0), (-0.2, 0.0)])
def test_exp_spline_raw(x, expected):
    assert eval_exp_bspline_raw(1.0, x) == pytest.approx(expected, abs=1e-12)


def test_exp_spline_raw_against_quadrature():
    for x in (0.3, 1.0, 1.5, 2.2, 2.9):
        assert eval_exp_bspline_raw(1.0, x) == pytest.approx(exp_bspline_by_quadrature((0.0, 1.0, -1.0), x), abs=1e-10)


@pytest.mark.parametrize("p", [0.5, 1.0, 2.0, 3.0])
def test_exp_spline_raw_symmetric_and_continuous(p):
    w = exp_bspline_raw_window(p)
    x = np.linspace(0, 3, 1201)
    assert np.max(np.abs(w(x) - w(3 - x))) < 1e-12
    assert np.max(w.knot_jumps()) < 1e-10
    assert np.all(w(x) >= -1e-15)


def test_exp_spline_raw_rejects_bad_p():
    with pytest.raises(InvalidParameterError):
        eval_exp_bspline_raw(0.0, 1.0)


@pytest.mark.parametrize("rates, x", [
    ((-1.0, 0.0, 1.0), 1.5),
    ((-1.0, 0.0, 1.0), 0.4),
    ((-1.0, 0.0, 1.0), 2.7),
    ((0.0, 1.0), 0.5),
    ((0.0, 1.0), 1.25),
    ((-2.0, 0.5, 1.0), 1.1),
    ((-1.0, -0.5, 0.3, 2.0), 2.6),
])
def test_general_formula_against_quadrature(rates, x):
    value = eval_exp_bspline_general(ExpSplineParams(rates), x)
    assert value == pytest.approx(exp_bspline_by_quadrature(rates, x), abs=1e-10)


def test_general_formula_examples():
    sym = ExpSplineParams.symmetric(1.0)
    assert eval_exp_bspline_general(sym, 1.5) == pytest.approx(eval_exp_bspline_raw(1.0, 1.5), abs=1e-12)
    assert eval_exp_bspline_general(sym, -0.2) == 0.0
    assert eval_exp_bspline_general(ExpSplineParams((0.0, 1.0)), 0.5) == pytest.approx(np.exp(0.5) - 1, abs=1e-12)


def test_general_matches_closed_form_everywhere():
    x = np.linspace(-0.5, 3.5, 3001)
    for p in (0.5, 1.0, 3.0):
        gen = exp_bspline_general_window(ExpSplineParams.symmetric(p))
        assert np.max(np.abs(gen(x) - exp_bspline_raw_window(p)(x))) < 1e-11


@pytest.mark.parametrize("rates, err", [
    ((0.0, 0.0, 1.0), DegenerateRatesError),
    ((0.0, 1e-10, 1.0), DegenerateRatesError),
    ((1.0, 0.0), InvalidParameterError),
    ((0.0,), InvalidParameterError),
])
def test_rate_validation(rates, err):
    with pytest.raises(err):
        ExpSplineParams(rates)


def test_order_one_general_formula_rejected():
    with pytest.raises(InvalidOrderError):
        exp_bspline_general_window(ExpSplineParams((1.0,)))


def test_normalized_eps3():
    w = normalize_exp_bspline(1.0)
    assert w(1.5) == pytest.approx(EPS3_P1_AT_1_5, abs=1e-13)
    assert w(1.5) == pytest.approx(0.765, abs=1e-3)
    assert w(0.0) == 0.0
    assert w.support == (0.0, 3.0)


@pytest.mark.parametrize("p", [0.5, 1.0, 2.0, 5.0, 20.0])
def test_partition_of_unity_eps3(p):
    assert partition_of_unity_residual(normalize_exp_bspline(p), Grid.from_range(0, 1, 1e-3)) < 1e-10


@pytest.mark.parametrize("order", [2, 3, 4])
def test_partition_of_unity_bsplines(order):
    assert partition_of_unity_residual(bspline_window(order), Grid.from_range(0, 1, 1e-3)) < 1e-12


def test_recenter():
    eps3 = normalize_exp_bspline(1.0)
    moved = recenter(eps3, 1.5)
    assert moved(0.0) == eps3(1.5)
    assert moved.support == (-1.5, 1.5)
    assert "1.5" in moved.label
    b2 = bspline_window(2)
    assert recenter(b2, 0) is b2
    assert recenter(b2, 1).support == (-2.0, 0.0)


def test_generator_window_eps3_shift():
    assert generator_window("eps3").support == (-1.5, 1.5)
    assert generator_window("eps3", 3.0, eps3_shift=0.0).support == (0.0, 3.0)
    with pytest.raises(ValueError):
        generator_window("B7")


def test_linear_combination_is_exact():
    b2 = bspline_window(2)
    w = linear_combination([(0.5, b2), (2.0, b2.shifted(1))])
    x = np.linspace(-3, 2, 777)
    assert np.max(np.abs(w(x) - (0.5 * b2(x) + 2.0 * b2(x + 1)))) < 1e-14


def test_sampled_window_interpolates_and_clips():
    w = SampledWindow.from_function(lambda x: 1 - np.abs(x), -1, 1, 1 / 8)
    assert w(0.0) == pytest.approx(1.0)
    assert w(0.0625) == pytest.approx(0.9375)
    assert w(1.5) == 0.0 and w(-1.01) == 0.0
    s = w.shifted(0.5)
    assert s(-0.5) == pytest.approx(1.0)


def test_scalar_and_array_evaluation():
    w = bspline_window(3)
    assert isinstance(w(0.1), float)
    assert w(np.zeros((2, 3))).shape == (2, 3)


@settings(max_examples=60, deadline=None)
@given(st.floats(-3, 3), st.integers(2, 5))
def test_bspline_recursion(x, order):
    # B_{N+1}(x) = int_{x-1/2}^{x+1/2} B_N(t) dt on a fine trapezoid grid
    t = np.linspace(x - 0.5, x + 0.5, 20001)
    integral = np.trapezoid(eval_bspline(order, t), t)
    assert eval_bspline(order + 1, x) == pytest.approx(integral, abs=1e-7)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.05, 10.0), st.floats(0.0, 1.0))
def test_eps3_partition_of_unity_property(p, x):
    w = normalize_exp_bspline(p)
    assert sum(w(x - n) for n in range(-3, 4)) == pytest.approx(1.0, abs=1e-10)
