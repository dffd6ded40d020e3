"""Path simulation of Bessel processes and of the flow-derivative processes.

Along a path we track

* ``rho``: the Bessel process itself,
* ``A_t = int_0^t ds / rho_s^2``, frozen at the discretised hitting time of 0,
* ``eta_t = 1{t < T0} exp((1 - delta)/2 * A_t)``, the derivative of the flow in x,
* ``D_t = rho_t * eta_t``, a martingale started at x.

Two discretisations are available.  The default ``milstein_sq_bessel_truncated``
steps ``rho_{k+1}^2 = max((rho_k + dB)_+^2 - (1 - delta) dt, 0)``, which is the
Milstein step for the squared process.  Its one-step map is nondecreasing in
``rho_k`` and ``A`` is accumulated so that ``eta_k`` equals the exact derivative
of the discrete flow.  ``euler_sq_bessel_truncated`` is the plain Euler step on
the squared process with trapezoidal ``A``; it is kept for comparison and is
badly biased for ``D`` when ``delta < 1``.
"""

from __future__ import annotations

import math
import struct
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numba
import numpy as np
from scipy import stats

from .records import McEstimate
from .rng import path_rng

__all__ = [
    "SCHEMES",
    "BesselPath",
    "FlowDiagnostics",
    "McEstimate",
    "PathSummary",
    "SamplerConfig",
    "ScalingSample",
    "coupled_flow",
    "discrete_stochastic_integral",
    "first_passage_times",
    "hitting_time_scaling_sample",
    "read_path_dump",
    "sample_exact_endpoint",
    "sample_exact_endpoints",
    "simulate_path",
    "simulate_summaries",
    "write_path_dump",
]

SCHEMES = ("milstein_sq_bessel_truncated", "euler_sq_bessel_truncated")
_MAGIC = b"BPATH01\x00"
_HEADER = struct.Struct("<8s4fQ")  # 32 bytes; see write_path_dump


@dataclass(frozen=True)
class SamplerConfig:
    dt: float = 1e-3
    rho_floor: float = 1e-6
    scheme: str = "milstein_sq_bessel_truncated"
    seed: int = 0
    stream_id: int = 0

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be > 0")
        if not 0 < self.rho_floor < 0.1:
            raise ValueError("rho_floor must lie in (0, 0.1)")
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}; choose from {SCHEMES}")
        if not (0 <= self.seed < 2**64 and 0 <= self.stream_id < 2**64):
            raise ValueError("seed and stream_id must be 64-bit unsigned")

    @property
    def scheme_code(self) -> int:
        return SCHEMES.index(self.scheme)

    def n_steps(self, T: float) -> int:
        return max(1, int(round(T / self.dt)))

    def replace(self, **kw) -> "SamplerConfig":
        d = dict(dt=self.dt, rho_floor=self.rho_floor, scheme=self.scheme,
                 seed=self.seed, stream_id=self.stream_id)
        d.update(kw)
        return SamplerConfig(**d)


@dataclass
class BesselPath:
    """One trajectory on the uniform grid ``times``; ``t0_index`` is None if the floor was never hit."""

    delta: float
    x: float
    dt: float
    times: np.ndarray
    rho: np.ndarray
    db: np.ndarray
    t0_index: Optional[int]
    a_vals: np.ndarray
    eta: np.ndarray
    d_vals: np.ndarray

    @property
    def T(self) -> float:
        return float(self.times[-1])


# ---------------------------------------------------------------------------
# numba kernels


@numba.njit(cache=True)
def _step(scheme, delta, dt, floor, rho, b):
    # one step; returns (rho_next, hit, dA)
    if scheme == 0:
        y = rho + b
        yp = y if y > 0.0 else 0.0
        X = yp * yp - (1.0 - delta) * dt
        if X < 0.0:
            X = 0.0
        rn = math.sqrt(X)
        if y <= floor or rn <= floor:
            return rn, True, 0.0
        u = (1.0 - delta) * dt / X
        if abs(u) > 1e-8:
            f = math.log1p(u) / u
        else:
            f = 1.0 - 0.5 * u
        return rn, False, dt / X * f
    X = rho * rho + 2.0 * rho * b + delta * dt
    if X < 0.0:
        X = 0.0
    rn = math.sqrt(X)
    if rn <= floor or rho <= 0.0:
        # rho = 0 only happens after absorption, where dA is unused
        return rn, rn <= floor, 0.0
    return rn, False, 0.5 * dt * (1.0 / (rho * rho) + 1.0 / X)


@numba.njit(cache=True)
def _full_path(z, x, delta, dt, floor, scheme):
    N = z.size
    sq = math.sqrt(dt)
    rho = np.empty(N + 1)
    a = np.empty(N + 1)
    eta = np.empty(N + 1)
    d = np.empty(N + 1)
    db = z * sq
    rho[0] = x
    a[0] = 0.0
    eta[0] = 1.0
    d[0] = x
    alive = x > floor
    if not alive:
        eta[0] = 0.0
        d[0] = 0.0
    t0 = -1 if alive else 0
    c = 0.5 * (1.0 - delta)
    for k in range(N):
        if delta == 0.0 and not alive:
            # zero-dimensional paths stay at the origin once absorbed
            rho[k + 1] = 0.0
            a[k + 1] = a[k]
            eta[k + 1] = 0.0
            d[k + 1] = 0.0
            continue
        rn, hit, dA = _step(scheme, delta, dt, floor, rho[k], db[k])
        rho[k + 1] = rn
        if alive and hit:
            alive = False
            t0 = k + 1
            if delta == 0.0:
                rho[k + 1] = 0.0
        if alive:
            a[k + 1] = a[k] + dA
            eta[k + 1] = math.exp(c * a[k + 1])
            d[k + 1] = rn * eta[k + 1]
        else:
            a[k + 1] = a[k]
            eta[k + 1] = 0.0
            d[k + 1] = 0.0
    return rho, db, a, eta, d, t0


@numba.njit(cache=True)
def _a_of(scheme, delta, A, eta):
    # A from eta = exp((1 - delta)/2 A) when A was not accumulated directly
    if scheme == 0 and delta != 1.0:
        return 2.0 * math.log(eta) / (1.0 - delta)
    return A


@numba.njit(cache=True)
def _summaries(Z, x, delta, dt, floor, scheme, rec, stop_at_hit):
    # Runs every row of Z and keeps only what the estimators need.
    n, N = Z.shape
    m = rec.size
    sq = math.sqrt(dt)
    c = 0.5 * (1.0 - delta)
    out_rho = np.zeros((n, m))
    out_d = np.zeros((n, m))
    out_s = np.zeros((n, m))
    t0 = np.full(n, -1, dtype=np.int64)
    a_hit = np.zeros(n)
    max_eta = np.zeros(n)
    d_hit = np.zeros(n)
    for i in range(n):
        rho = x
        A = 0.0
        eta = 1.0
        S = 0.0
        alive = x > floor
        if not alive:
            eta = 0.0
            t0[i] = 0
        mx = eta
        r = 0
        for k in range(N):
            b = Z[i, k] * sq
            if alive:
                S += eta * b
            if delta == 0.0 and not alive:
                rn = 0.0
            else:
                if scheme == 0:
                    # inline Milstein step; eta is carried as the running product
                    # of one-step flow derivatives, avoiding exp/log per step
                    y = rho + b
                    yp = y if y > 0.0 else 0.0
                    X = yp * yp - (1.0 - delta) * dt
                    if X < 0.0:
                        X = 0.0
                    rn = math.sqrt(X)
                    hit = y <= floor or rn <= floor
                    if alive and not hit:
                        eta *= yp / rn
                        if delta == 1.0:
                            A += dt / X
                else:
                    rn, hit, dA = _step(scheme, delta, dt, floor, rho, b)
                    if alive and not hit:
                        A += dA
                        eta = math.exp(c * A)
                if alive:
                    if hit:
                        alive = False
                        t0[i] = k + 1
                        a_hit[i] = _a_of(scheme, delta, A, eta)
                        d_hit[i] = rho * eta
                        eta = 0.0
                        if delta == 0.0:
                            rn = 0.0
                    elif eta > mx:
                        mx = eta
            rho = rn
            while r < m and rec[r] == k + 1:
                out_rho[i, r] = rho
                out_d[i, r] = rho * eta
                out_s[i, r] = S
                r += 1
            if stop_at_hit and not alive:
                break
        # slots skipped by an early stop: D and the Ito sum are frozen, rho is unknown
        while r < m:
            out_rho[i, r] = np.nan
            out_s[i, r] = S
            r += 1
        if alive:
            a_hit[i] = _a_of(scheme, delta, A, eta)
            d_hit[i] = rho * eta
        max_eta[i] = mx
    return out_rho, out_d, out_s, t0, a_hit, max_eta, d_hit


@numba.njit(cache=True)
def _first_passage_block(z, rho, dt, floor, scheme, delta):
    # advances rho through the block; returns (rho, steps_used or -1 if no hit)
    sq = math.sqrt(dt)
    for k in range(z.size):
        rn, hit, _ = _step(scheme, delta, dt, floor, rho, z[k] * sq)
        if hit:
            return rn, k + 1
        rho = rn
    return rho, -1


# ---------------------------------------------------------------------------
# exact endpoint sampling


def sample_exact_endpoint(delta: float, z0: float, T: float, rng: np.random.Generator) -> float:
    """One draw of the squared Bessel process ``X_T`` started at ``z0``.

    Poisson-Gamma mixture: ``N ~ Poisson(z0/2T)``, ``X_T = T * Gamma(delta/2 + N, scale=2)``,
    with shape 0 meaning the point mass at 0.
    """
    if not T > 0:
        raise ValueError("T must be > 0")
    if delta < 0 or z0 < 0:
        raise ValueError("delta and z0 must be >= 0")
    k = rng.poisson(z0 / (2.0 * T))
    shape = 0.5 * delta + k
    if shape == 0:
        return 0.0
    return float(T * rng.gamma(shape, 2.0))


def sample_exact_endpoints(delta: float, z0: float, T: float, n: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` independent draws of ``X_T``; vectorised form of :func:`sample_exact_endpoint`."""
    if not T > 0:
        raise ValueError("T must be > 0")
    if delta < 0 or z0 < 0:
        raise ValueError("delta and z0 must be >= 0")
    k = rng.poisson(z0 / (2.0 * T), size=n)
    shape = 0.5 * delta + k
    out = np.zeros(n)
    pos = shape > 0
    out[pos] = T * rng.gamma(shape[pos], 2.0)
    return out


# ---------------------------------------------------------------------------
# single paths


def _path_normals(cfg: SamplerConfig, path_index: int, N: int, substream: int = 0):
    return path_rng(cfg.seed, cfg.stream_id, path_index, substream).standard_normal(N)


def _path_from_normals(delta, x, T, cfg, z) -> BesselPath:
    rho, db, a, eta, d, t0 = _full_path(z, float(x), float(delta), cfg.dt, cfg.rho_floor, cfg.scheme_code)
    times = cfg.dt * np.arange(z.size + 1)
    return BesselPath(float(delta), float(x), cfg.dt, times, rho, db,
                      None if t0 < 0 else int(t0), a, eta, d)


def simulate_path(delta: float, x: float, T: float, cfg: SamplerConfig,
                  rng: Optional[np.random.Generator] = None, path_index: int = 0) -> BesselPath:
    """Simulate one path on ``[0, T]`` with ``round(T/dt)`` steps.

    Without ``rng`` the increments come from the per-path stream
    ``(cfg.seed, cfg.stream_id, path_index)``.
    """
    if not (x > 0 and T > 0 and delta >= 0):
        raise ValueError("need x > 0, T > 0, delta >= 0")
    N = cfg.n_steps(T)
    z = rng.standard_normal(N) if rng is not None else _path_normals(cfg, path_index, N)
    return _path_from_normals(delta, x, T, cfg, z)


def discrete_stochastic_integral(path: BesselPath) -> float:
    """Left-point Ito sum ``sum_k eta_k dB_k`` over the whole path."""
    if path.db.size == 0:
        return 0.0
    return float(np.dot(path.eta[:-1], path.db))


# ---------------------------------------------------------------------------
# many paths


@dataclass
class PathSummary:
    """Per-path quantities at the recorded steps ``rec_steps`` (columns) for ``n`` paths (rows)."""

    rec_steps: np.ndarray
    rec_times: np.ndarray
    rho: np.ndarray
    d: np.ndarray
    stoch_int: np.ndarray
    t0_index: np.ndarray
    a_at_hit: np.ndarray
    max_eta: np.ndarray
    d_at_hit: np.ndarray
    seed: int = 0

    @property
    def absorbed(self) -> np.ndarray:
        return self.t0_index >= 0


def _summary_chunk(args):
    delta, x, cfg, N, rec, stop, lo, hi, substream = args
    Z = np.empty((hi - lo, N))
    for j, i in enumerate(range(lo, hi)):
        Z[j] = _path_normals(cfg, i, N, substream)
    return _summaries(Z, float(x), float(delta), cfg.dt, cfg.rho_floor, cfg.scheme_code,
                      rec, stop)


def simulate_summaries(delta: float, x: float, T: float, cfg: SamplerConfig, n: int,
                       record_times=None, stop_at_hit: bool = False, workers: int = 1,
                       chunk: int = 256, substream: int = 0) -> PathSummary:
    """Simulate paths ``0..n-1`` and keep ``rho``, ``D`` and the Ito sum at ``record_times``.

    ``stop_at_hit`` abandons a path once it is absorbed.  That is harmless for
    ``D``, ``eta`` and the Ito sum, which are frozen afterwards, but ``rho`` at later
    recorded steps becomes NaN, so estimators involving ``F(rho_T) (D_T - x)`` must
    not use it.
    """
    if not (x > 0 and T > 0 and n > 0):
        raise ValueError("need x > 0, T > 0, n > 0")
    N = cfg.n_steps(T)
    if record_times is None:
        record_times = [T]
    rec = np.array(sorted({max(1, min(N, int(round(t / cfg.dt)))) for t in record_times}), dtype=np.int64)
    jobs = [(delta, x, cfg, N, rec, stop_at_hit, lo, min(n, lo + chunk), substream)
            for lo in range(0, n, chunk)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(workers) as ex:
            parts = list(ex.map(_summary_chunk, jobs))
    else:
        parts = [_summary_chunk(j) for j in jobs]
    cat = [np.concatenate([p[i] for p in parts]) for i in range(7)]
    return PathSummary(rec, rec * cfg.dt, *cat, seed=cfg.seed)


def first_passage_times(delta: float, x: float, cfg: SamplerConfig, n: int, horizon: float,
                        substream: int = 0, block: int = 4096) -> np.ndarray:
    """Discretised hitting times of the floor for paths ``0..n-1``; ``inf`` if not hit by ``horizon``.

    Increments are drawn in blocks from each path's stream and the path stops at
    the first hit, so long horizons cost only what is needed.
    """
    N = cfg.n_steps(horizon)
    out = np.full(n, math.inf)
    for i in range(n):
        g = path_rng(cfg.seed, cfg.stream_id, i, substream)
        rho = float(x)
        used = 0
        while used < N:
            m = min(block, N - used)
            rho, k = _first_passage_block(g.standard_normal(m), rho, cfg.dt, cfg.rho_floor,
                                          cfg.scheme_code, float(delta))
            if k >= 0:
                out[i] = (used + k) * cfg.dt
                break
            used += m
    return out


# ---------------------------------------------------------------------------
# coupled flows


@dataclass
class FlowDiagnostics:
    violations: int
    k_star: Optional[int]
    post_coalescence_gap: float
    t_eval: Optional[float] = None
    fd_ratio: Optional[float] = None
    eta_x: Optional[float] = None

    @property
    def fd_rel_error(self) -> Optional[float]:
        if self.fd_ratio is None or not self.eta_x:
            return None
        return abs(self.fd_ratio - self.eta_x) / self.eta_x


def coupled_flow(delta: float, x: float, y: float, T: float, cfg: SamplerConfig,
                 rng: Optional[np.random.Generator] = None, path_index: int = 0,
                 t_eval: Optional[float] = None):
    """Paths from ``x`` and ``y > x`` driven by the same increments.

    Returns ``(path_x, path_y, FlowDiagnostics)``.  The difference quotient
    ``(rho_t(y) - rho_t(x))/(y - x)`` is compared with ``eta_t(x)`` at ``t_eval``
    when the x-path is still alive there.
    """
    if not 0 < x < y:
        raise ValueError("need 0 < x < y")
    N = cfg.n_steps(T)
    z = rng.standard_normal(N) if rng is not None else _path_normals(cfg, path_index, N)
    px = _path_from_normals(delta, x, T, cfg, z)
    py = _path_from_normals(delta, y, T, cfg, z)
    gap = py.rho - px.rho
    violations = int(np.count_nonzero(gap < 0))
    close = np.flatnonzero(np.abs(gap) <= cfg.rho_floor)
    k_star = int(close[0]) if close.size else None
    post = float(np.max(np.abs(gap[k_star:]))) if k_star is not None else math.nan
    diag = FlowDiagnostics(violations, k_star, post)
    if t_eval is not None:
        k = min(N, int(round(t_eval / cfg.dt)))
        diag.t_eval = k * cfg.dt
        if px.t0_index is None or k < px.t0_index:
            diag.fd_ratio = float(gap[k] / (y - x))
            diag.eta_x = float(px.eta[k])
    return px, py, diag


# ---------------------------------------------------------------------------
# hitting-time scaling


class ScalingSample(NamedTuple):
    samples_y: np.ndarray
    samples_1: np.ndarray
    ks_statistic: float
    pvalue: float
    censored_y: int
    censored_1: int
    cap_factor: float


def hitting_time_scaling_sample(delta: float, y: float, n: int, cfg: SamplerConfig,
                                rng=None, cap_factor: float = 50.0) -> ScalingSample:
    """Hitting times of the floor from ``y`` and from 1, and the KS distance of ``T0(y)/y^2`` to ``T0(1)``.

    Paths still alive at ``cap_factor * start^2`` are censored at that cap in both
    samples, which keeps the two scaled samples comparable.  The two samples use
    independent substreams.  ``rng`` is accepted for interface symmetry and ignored;
    randomness comes from ``cfg``.
    """
    if not 0 <= delta < 2:
        raise ValueError("hitting times are finite only for delta < 2")
    if not (y > 0 and n > 0):
        raise ValueError("need y > 0 and n > 0")
    ty = first_passage_times(delta, y, cfg, n, cap_factor * y * y, substream=1)
    t1 = first_passage_times(delta, 1.0, cfg, n, cap_factor, substream=2)
    cy = int(np.count_nonzero(~np.isfinite(ty)))
    c1 = int(np.count_nonzero(~np.isfinite(t1)))
    sy = np.where(np.isfinite(ty), ty / (y * y), cap_factor)
    s1 = np.where(np.isfinite(t1), t1, cap_factor)
    res = stats.ks_2samp(sy, s1)
    return ScalingSample(sy, s1, float(res.statistic), float(res.pvalue), cy, c1, cap_factor)


# ---------------------------------------------------------------------------
# binary dump


def write_path_dump(path: BesselPath, fh) -> None:
    """Binary dump: 32-byte header then little-endian float64 records ``(t, rho, eta, d)``.

    Header layout: 8-byte magic ``b"BPATH01\\0"``, float32 ``delta, x, T, dt``, uint64 ``N``.
    The header values are informational; exact times are in the records.
    """
    N = path.times.size - 1
    fh.write(_HEADER.pack(_MAGIC, path.delta, path.x, path.T, path.dt, N))
    rec = np.column_stack([path.times, path.rho, path.eta, path.d_vals]).astype("<f8")
    fh.write(rec.tobytes())


def read_path_dump(fh):
    """Inverse of :func:`write_path_dump`; returns ``(header_dict, records)``."""
    magic, delta, x, T, dt, N = _HEADER.unpack(fh.read(_HEADER.size))
    if magic != _MAGIC:
        raise ValueError("not a BPATH01 dump")
    recs = np.frombuffer(fh.read(), dtype="<f8").reshape(-1, 4)
    return {"delta": delta, "x": x, "T": T, "dt": dt, "N": int(N)}, recs
