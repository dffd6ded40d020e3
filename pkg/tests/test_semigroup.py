import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from besselbel.kernels import DELTA_L2, BesselDim
from besselbel.semigroup import (
    QuadratureSettings,
    SemigroupQuery,
    apply_kernel,
    derivative_semigroup,
    fd_derivative,
    fd_second_derivative,
    second_derivative_semigroup,
    strong_feller_sweep,
)
from besselbel.testfunctions import get_test_function

ONE = get_test_function("one")
GAUSS = get_test_function("exp_neg_y2")
IND = get_test_function("indicator_0_a", a=1.0)


def q(delta, T, x, F=GAUSS):
    return SemigroupQuery(BesselDim(delta), T, x, F)


@pytest.mark.parametrize("delta", [0.0, 0.5, 1.0, 2.0, 3.5])
def test_mass_is_one(delta):
    assert apply_kernel(q(delta, 1.0, 1.0, ONE)) == pytest.approx(1.0, abs=1e-9)


def test_dimension2_gaussian_closed_form():
    # E exp(-rho_T^2) for a planar Brownian motion from distance x
    T, x = 0.5, 1.0
    exact = math.exp(-x * x / (1 + 2 * T)) / (1 + 2 * T)
    assert apply_kernel(q(2.0, T, x)) == pytest.approx(exact, abs=1e-10)


def test_decreasing_function_ordered_in_dimension():
    # larger dimension pushes rho up, so E F(rho_T) decreases for decreasing F
    vals = [apply_kernel(q(d, 1.0, 0.7)) for d in (0.0, 0.5, 1.0, 2.0, 3.0)]
    assert all(a > b for a, b in zip(vals[:-1], vals[1:]))


def test_derivative_zero_at_origin():
    assert derivative_semigroup(q(1.5, 1.0, 0.0)) == 0.0


@settings(max_examples=25, deadline=None)
@given(st.floats(0.0, 4.0), st.floats(0.2, 2.5), st.floats(0.2, 2.0))
def test_derivative_matches_finite_differences(delta, x, T):
    for F in (GAUSS, IND):
        sq = q(delta, T, x, F)
        assert derivative_semigroup(sq) == pytest.approx(fd_derivative(sq), rel=1e-5, abs=1e-8)


@pytest.mark.parametrize("delta,x,T", [(0.5, 1.0, 0.5), (2.0, 0.8, 1.0), (0.0, 1.2, 0.7)])
def test_second_derivative_matches_finite_differences(delta, x, T):
    sq = q(delta, T, x)
    assert second_derivative_semigroup(sq) == pytest.approx(fd_second_derivative(sq), abs=1e-4)


def test_fd_error_quarters_when_step_halves():
    sq = q(1.0, 0.5, 1.0)
    exact = derivative_semigroup(sq)
    e1 = abs(fd_derivative(sq, h=0.2) - exact)
    e2 = abs(fd_derivative(sq, h=0.1) - exact)
    assert 3.5 < e1 / e2 < 4.5


def test_bad_queries_rejected():
    with pytest.raises(ValueError):
        q(1.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        q(1.0, 1.0, -0.1)
    with pytest.raises(ValueError):
        QuadratureSettings(abs_tol=0.0)
    with pytest.raises(ValueError):
        SemigroupQuery(BesselDim(1.0), 1.0, 1.0, get_test_function("gaussian", lam=-1.0))


def test_query_at_replaces_fields():
    sq = q(1.0, 1.0, 1.0)
    moved = sq.at(delta=3.0, x=0.5)
    assert (moved.dim.delta, moved.x, moved.T) == (3.0, 0.5, 1.0)


def test_strong_feller_sweep_small_grid():
    Fs = [ONE, GAUSS, IND]
    rep = strong_feller_sweep(BesselDim(2.0), [1.0, 0.5, 0.25], 2.0, Fs, n_x=9)
    assert rep.passed
    assert rep.details["feller_worst_slack"] < 0
    assert len(rep.details["scaled"]) == 3
    # below the threshold only an exploratory record is produced
    low = strong_feller_sweep(BesselDim(0.5), [1.0, 0.5], 2.0, Fs, n_x=9, exploratory=True)
    assert low.details["mode"] == "exploratory"
    with pytest.raises(ValueError):
        strong_feller_sweep(BesselDim(0.5), [1.0, 0.5], 2.0, Fs, n_x=9, assert_ratio=True)
    with pytest.raises(ValueError):
        strong_feller_sweep(BesselDim(2.0), [0.5, 1.0], 2.0, Fs, n_x=9)


def test_threshold_dimension_sweep_has_alpha():
    rep = strong_feller_sweep(BesselDim(DELTA_L2), [1.0, 0.5], 1.0, [GAUSS], n_x=5)
    assert rep.details["alpha"] == pytest.approx(BesselDim(DELTA_L2).alpha_exponent)
    assert np.isfinite(rep.details["ratio"])
