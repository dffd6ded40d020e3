import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, special, stats

from besselbel.kernels import (
    DELTA_L2,
    BesselDim,
    DensityQuery,
    bessel_i_series,
    density,
    kernel_atom_delta0,
    log_bessel_i,
    log_gamma,
    sq_bessel_laplace,
    transition_density,
)
from besselbel.semigroup import SemigroupQuery, apply_kernel
from besselbel.testfunctions import gaussian

deltas = st.floats(0.1, 5.0)
points = st.floats(0.05, 3.0)
times = st.floats(0.1, 3.0)


# --- oracle values --------------------------------------------------------

def test_bessel_i0_at_one():
    assert bessel_i_series(0.0, 1.0) == pytest.approx(1.2660658777520082, rel=1e-14)


def test_log_gamma_half():
    assert log_gamma(0.5) == pytest.approx(0.5 * math.log(math.pi), rel=1e-14)


def test_density_from_origin_dim2():
    # rho_1 from 0 in dimension 2 is Rayleigh: y exp(-y^2/2)
    assert density(2.0, 1.0, 0.0, 1.0) == pytest.approx(math.exp(-0.5), rel=1e-14)


def test_density_dim2_from_one():
    assert density(2.0, 1.0, 1.0, 1.0) == pytest.approx(math.exp(-1.0) * special.iv(0, 1.0), rel=1e-13)


def test_laplace_dim2():
    assert sq_bessel_laplace(2.0, 0.5, 1.0, 1.0) == pytest.approx(0.5 * math.exp(-0.5), rel=1e-14)


def test_delta0_atom():
    atom, dens = kernel_atom_delta0(1.0, 1.0)
    assert atom == pytest.approx(math.exp(-0.5), rel=1e-14)
    mass = integrate.quad(dens, 0, 20, epsabs=1e-13)[0]
    assert atom + mass == pytest.approx(1.0, abs=1e-10)


def test_delta0_series_matches_bessel_i1():
    # absolutely continuous part: (x/T) exp(-(x^2+y^2)/2T) I_1(xy/T) in the rho variable
    T, x = 0.7, 1.3
    _, dens = kernel_atom_delta0(T, x)
    for y in (0.1, 0.8, 2.5):
        ref = x / T * math.exp(-(x * x + y * y) / (2 * T)) * special.iv(1, x * y / T)
        assert dens(y) == pytest.approx(ref, rel=1e-12)


def test_density_query_and_dim():
    q = DensityQuery(BesselDim(2.0), 1.0, 1.0, 1.0)
    assert transition_density(q) == density(2.0, 1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        DensityQuery(BesselDim(2.0), 0.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        density(0.0, 1.0, 1.0, 1.0)


def test_dimension_exponents():
    assert BesselDim(0.5).p_threshold == pytest.approx(1.125)
    assert BesselDim(DELTA_L2).p_threshold == pytest.approx(2.0)
    assert math.isinf(BesselDim(1.0).p_threshold)
    assert BesselDim(2.0).nu == 0.0
    with pytest.raises(ValueError):
        BesselDim(0.5).alpha_exponent
    with pytest.raises(ValueError):
        BesselDim(-0.1)


def test_bessel_overflow_raises():
    with pytest.raises(OverflowError):
        bessel_i_series(-0.5, 0.0)


# --- properties -----------------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(st.floats(-0.9, 6.0, allow_subnormal=False), st.floats(1e-3, 60.0))
def test_log_bessel_matches_scipy(nu, z):
    ref = math.log(special.ive(nu, z)) + z
    assert log_bessel_i(nu, z) == pytest.approx(ref, rel=1e-11, abs=1e-11)


@settings(max_examples=40, deadline=None)
@given(deltas, points, times)
def test_density_integrates_to_one(delta, x, T):
    f = lambda y: density(delta, T, x, y)
    upper = x + 15 * math.sqrt(T) + 5
    mass = integrate.quad(f, 0, upper, points=[x, math.sqrt(T)], limit=200, epsabs=1e-12)[0]
    assert mass == pytest.approx(1.0, abs=1e-7)


@settings(max_examples=40, deadline=None)
@given(deltas, points, points, times)
def test_density_symmetric_wrt_speed_measure(delta, x, y, T):
    # p_T(x,y) / y^(delta-1) is symmetric in (x, y)
    lhs = density(delta, T, x, y) * x ** (delta - 1)
    rhs = density(delta, T, y, x) * y ** (delta - 1)
    assert lhs == pytest.approx(rhs, rel=1e-10)


@settings(max_examples=40, deadline=None)
@given(deltas, points, points, times, st.floats(0.3, 3.0))
def test_density_brownian_scaling(delta, x, y, T, c):
    assert density(delta, T, x, y) == pytest.approx(density(delta, c * c * T, c * x, c * y) * c, rel=1e-10)


@settings(max_examples=40, deadline=None)
@given(deltas, points, times)
def test_squared_endpoint_is_noncentral_chi2(delta, x, T):
    # rho_T^2 / T ~ ncx2(delta, x^2/T)
    for y in (0.5 * x, x, 2 * x + 0.3):
        ref = stats.ncx2.pdf(y * y / T, delta, x * x / T) * 2 * y / T
        assert density(delta, T, x, y) == pytest.approx(ref, rel=1e-7)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.0, 4.0), points, times, st.floats(0.0, 3.0))
def test_laplace_transform_matches_semigroup(delta, x, T, lam):
    lt = sq_bessel_laplace(delta, T, x * x, lam)
    num = apply_kernel(SemigroupQuery(BesselDim(delta), T, x, gaussian(lam)))
    assert lt == pytest.approx(num, abs=1e-8)


def test_chapman_kolmogorov():
    delta, x, y, s, t = 1.5, 0.8, 1.2, 0.4, 0.6
    f = lambda z: density(delta, s, x, z) * density(delta, t, z, y)
    lhs = integrate.quad(f, 0, 1, limit=200)[0] + integrate.quad(f, 1, 15, limit=200)[0]
    assert lhs == pytest.approx(density(delta, s + t, x, y), rel=1e-9)


def test_density_vectorised():
    ys = np.array([0.2, 0.5, 1.0, 3.0])
    v = density(0.5, 1.0, 1.0, ys)
    assert v.shape == ys.shape
    assert np.allclose(v, [density(0.5, 1.0, 1.0, y) for y in ys], rtol=1e-15)
