"""Special functions and closed-form transition kernels of Bessel processes.

Everything here is a pure function of its arguments.  The modified Bessel
function is summed from its power series in log space, so transition
densities can be evaluated for large ``x*y/T`` without overflowing the
intermediate ``I_nu`` value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

__all__ = [
    "DELTA_L2",
    "BesselDim",
    "DensityQuery",
    "bessel_i_series",
    "density",
    "kernel_atom_delta0",
    "log_bessel_i",
    "log_gamma",
    "sq_bessel_laplace",
    "transition_density",
]

#: Smallest dimension for which the flow derivative is square integrable.
DELTA_L2 = 2.0 * (math.sqrt(2.0) - 1.0)

_SERIES_RTOL = 1e-16
_SERIES_MAX_TERMS = 500
_LOG_RTOL = math.log(_SERIES_RTOL)
_LOG_FLOAT_MAX = math.log(np.finfo(float).max)


@dataclass(frozen=True)
class BesselDim:
    """Dimension ``delta`` of a Bessel process and the quantities derived from it."""

    delta: float

    def __post_init__(self):
        if not (self.delta >= 0.0 and math.isfinite(self.delta)):
            raise ValueError(f"dimension must be finite and >= 0, got {self.delta!r}")

    @property
    def nu(self) -> float:
        """Bessel index ``delta/2 - 1``."""
        return self.delta / 2.0 - 1.0

    @property
    def p_threshold(self) -> float:
        """Largest ``p`` with ``D_t`` in ``L^p``; ``math.inf`` for ``delta >= 1``."""
        d = self.delta
        if d >= 1.0:
            return math.inf
        return (2.0 - d) ** 2 / (4.0 * (1.0 - d))

    @property
    def alpha_exponent(self) -> float:
        """Time exponent of the sharpened strong Feller modulus.

        Only defined for ``delta >= DELTA_L2``; below that a ``ValueError`` is
        raised since no such bound is known there.
        """
        d = self.delta
        if d < DELTA_L2 - 1e-12:
            raise ValueError(
                f"alpha exponent undefined for delta={d} < 2(sqrt(2)-1)={DELTA_L2}"
            )
        if d >= 1.0:
            return 0.5
        return 0.5 + (1.0 - d) / (2.0 - d)


@dataclass(frozen=True)
class DensityQuery:
    dim: BesselDim
    T: float
    x: float
    y: float

    def __post_init__(self):
        if not self.T > 0.0:
            raise ValueError(f"T must be > 0, got {self.T!r}")
        if not (self.x >= 0.0 and self.y >= 0.0):
            raise ValueError(f"x and y must be >= 0, got x={self.x!r}, y={self.y!r}")


def log_gamma(z: float) -> float:
    """Natural log of the gamma function for ``z > 0``."""
    z = float(z)
    if not z > 0.0:
        raise ValueError(f"log_gamma requires z > 0, got {z!r}")
    return math.lgamma(z)


@numba.njit(cache=True)
def _log_bessel_i1(nu1, z):
    # Returns (log I_nu(z), converged) with nu1 = nu + 1 passed separately, so
    # that the Gamma factors stay accurate when nu is close to -1.  Terms are
    # added in log space with a running maximum so nothing overflows.
    nu = nu1 - 1.0
    if z == 0.0:
        if nu1 == 1.0:
            return 0.0, True
        if nu1 > 1.0 or nu1 == 0.0:
            return -np.inf, True
        return np.inf, True
    lz = math.log(0.5 * z)
    m = -np.inf
    s = 0.0
    for k in range(_SERIES_MAX_TERMS):
        a = k + nu1
        if a <= 0.0:
            # 1/Gamma(0) = 0: only reachable for nu = -1 at k = 0
            continue
        t = (2.0 * k + nu) * lz - math.lgamma(k + 1.0) - math.lgamma(a)
        if m > -np.inf and t < m + math.log(s) + _LOG_RTOL:
            return m + math.log(s), True
        if t > m:
            s = s * math.exp(m - t) + 1.0
            m = t
        else:
            s += math.exp(t - m)
    return m + math.log(s), False


@numba.njit(cache=True)
def _log_bessel_i(nu, z):
    return _log_bessel_i1(nu + 1.0, z)


def log_bessel_i(nu: float, z: float) -> float:
    """Log of the modified Bessel function ``I_nu(z)`` from its power series.

    Raises ``OverflowError`` when the series has not converged within the term
    cap, which happens only for arguments far beyond double range.
    """
    nu = float(nu)
    z = float(z)
    if nu < -1.0 or z < 0.0:
        raise ValueError(f"need nu >= -1 and z >= 0, got nu={nu}, z={z}")
    val, ok = _log_bessel_i(nu, z)
    if not ok:
        raise OverflowError(
            f"I_{nu}({z}) series not converged in {_SERIES_MAX_TERMS} terms"
        )
    return val


def bessel_i_series(nu: float, z: float) -> float:
    """Modified Bessel function of the first kind ``I_nu(z)``, ``nu >= -1``, ``z >= 0``.

    >>> bessel_i_series(0.0, 0.0)
    1.0
    """
    lv = log_bessel_i(nu, z)
    if lv > _LOG_FLOAT_MAX:
        raise OverflowError(f"I_{nu}({z}) = exp({lv}) exceeds double range")
    return math.exp(lv)


@numba.njit(cache=True)
def _log_density(delta, T, x, y):
    # log p^delta_T(x, y) for delta > 0; status False when the series cap was hit
    nu = 0.5 * delta - 1.0
    if x == 0.0:
        if y == 0.0:
            e = 2.0 * nu + 1.0
            if e > 0.0:
                return -np.inf, True
            if e < 0.0:
                return np.inf, True
        return (
            -nu * math.log(2.0)
            - (nu + 1.0) * math.log(T)
            - math.lgamma(0.5 * delta)
            + (2.0 * nu + 1.0) * math.log(y)
            - y * y / (2.0 * T),
            True,
        )
    if y == 0.0:
        # only the k = 0 term of the series survives
        e = 2.0 * nu + 1.0
        if e > 0.0:
            return -np.inf, True
        if e < 0.0:
            return np.inf, True
        return (
            -math.log(T)
            - x * x / (2.0 * T)
            - nu * math.log(2.0 * T)
            - math.lgamma(0.5 * delta),
            True,
        )
    li, ok = _log_bessel_i1(0.5 * delta, x * y / T)
    lp = (
        -math.log(T)
        - (x * x + y * y) / (2.0 * T)
        + nu * (math.log(y) - math.log(x))
        + math.log(y)
        + li
    )
    return lp, ok


@numba.njit(cache=True)
def _density_array(delta, T, x, ys):
    out = np.empty(ys.size)
    ok_all = True
    for i in range(ys.size):
        lp, ok = _log_density(delta, T, x, ys[i])
        ok_all = ok_all and ok
        out[i] = math.exp(lp)
    return out, ok_all


@numba.njit(cache=True)
def _log_delta0_series(T, x, y):
    # log of x * I_1(x y / T) via sum_k x^{2k+2} (y/2T)^{2k+1} / (k! (k+1)!)
    lx = math.log(x)
    ly = math.log(y / (2.0 * T))
    m = -np.inf
    s = 0.0
    for k in range(_SERIES_MAX_TERMS):
        t = (2.0 * k + 2.0) * lx + (2.0 * k + 1.0) * ly - math.lgamma(k + 1.0) - math.lgamma(k + 2.0)
        if m > -np.inf and t < m + math.log(s) + _LOG_RTOL:
            return m + math.log(s), True
        if t > m:
            s = s * math.exp(m - t) + 1.0
            m = t
        else:
            s += math.exp(t - m)
    return m + math.log(s), False


@numba.njit(cache=True)
def _delta0_density_array(T, x, ys):
    out = np.zeros(ys.size)
    ok_all = True
    if x == 0.0:
        return out, ok_all
    for i in range(ys.size):
        y = ys[i]
        if y <= 0.0:
            continue
        ls, ok = _log_delta0_series(T, x, y)
        ok_all = ok_all and ok
        out[i] = math.exp(-math.log(T) - (x * x + y * y) / (2.0 * T) + ls)
    return out, ok_all


def _check_T(T):
    if not T > 0.0:
        raise ValueError(f"T must be > 0, got {T!r}")


def density(delta, T, x, y):
    """Transition density ``p^delta_T(x, y)`` for ``delta > 0``, vectorised over ``y``."""
    if not delta > 0.0:
        raise ValueError("density needs delta > 0; use kernel_atom_delta0 for delta = 0")
    _check_T(T)
    if x < 0.0:
        raise ValueError(f"x must be >= 0, got {x!r}")
    ys = np.asarray(y, dtype=float)
    if np.any(ys < 0.0):
        raise ValueError("y must be >= 0")
    out, ok = _density_array(float(delta), float(T), float(x), np.atleast_1d(ys).ravel())
    if not ok:
        raise OverflowError("Bessel series did not converge; x*y/T too large")
    if ys.ndim == 0:
        return float(out[0])
    return out.reshape(ys.shape)


def transition_density(q: DensityQuery) -> float:
    """Evaluate ``p^delta_T(x, y)`` for the query; ``x = 0`` uses the boundary formula."""
    if not q.dim.delta > 0.0:
        raise ValueError("transition_density needs delta > 0; use kernel_atom_delta0")
    return density(q.dim.delta, q.T, q.x, q.y)


def kernel_atom_delta0(T, x):
    """Law of the zero-dimensional Bessel process at time ``T``.

    Returns ``(atom_mass, density)``: the mass absorbed at 0 and a vectorised
    callable for the absolutely continuous part on ``(0, inf)``.
    """
    _check_T(T)
    if x < 0.0:
        raise ValueError(f"x must be >= 0, got {x!r}")
    T = float(T)
    x = float(x)
    atom = math.exp(-x * x / (2.0 * T))

    def dens(y):
        ys = np.asarray(y, dtype=float)
        out, ok = _delta0_density_array(T, x, np.atleast_1d(ys).ravel())
        if not ok:
            raise OverflowError("Bessel series did not converge; x*y/T too large")
        if ys.ndim == 0:
            return float(out[0])
        return out.reshape(ys.shape)

    return atom, dens


def sq_bessel_laplace(delta, T, z, lam):
    """``E[exp(-lam X_T)]`` for the squared Bessel process ``X`` started at ``z``."""
    _check_T(T)
    if lam < 0.0 or z < 0.0 or delta < 0.0:
        raise ValueError("need delta, z, lam >= 0")
    r = 1.0 + 2.0 * lam * T
    return math.exp(-lam * z / r) * r ** (-delta / 2.0)
