"""Statistical cross-checks of the Bessel gradient formulas.

Each check returns a :class:`VerificationReport`.  Monte-Carlo quantities are
compared with quadrature values from :mod:`besselbel.semigroup`, never with
another Monte-Carlo run.
"""

from __future__ import annotations

import math
from typing import Sequence

import numba
import numpy as np
from scipy import integrate

from .kernels import DELTA_L2, BesselDim
from .pathsim import SamplerConfig, simulate_summaries
from .records import McEstimate, VerificationReport
from .rng import path_rng
from .semigroup import SemigroupQuery, apply_kernel, derivative_semigroup, fd_derivative
from .testfunctions import TestFunction

__all__ = [
    "VerificationReport",
    "bel_mc_derivative",
    "bel_mc_grid",
    "calibrate_dt_budget",
    "classical_baseline",
    "eta_blowup_check",
    "hill_estimator",
    "martingale_check",
    "median_of_means",
    "moment_tail_diagnostics",
    "ou_derivative_exact",
    "rn_identity_check",
    "triple_agreement",
]

MOM_BLOCKS = 31


def median_of_means(samples, blocks: int = MOM_BLOCKS, seed: int = 0) -> McEstimate:
    """Median of ``blocks`` consecutive block means.

    The standard error is the asymptotic one for a median, ``1.2533 * s / sqrt(blocks)``,
    with ``s`` the IQR-based spread of the block means so that a few huge blocks
    do not dominate it.
    """
    s = np.asarray(samples, dtype=float)
    m = s.size // blocks
    if m < 1:
        raise ValueError("fewer samples than blocks")
    bm = s[: m * blocks].reshape(blocks, m).mean(axis=1)
    q1, q3 = np.percentile(bm, [25, 75])
    spread = (q3 - q1) / 1.349
    return McEstimate(float(np.median(bm)), float(1.2533 * spread / math.sqrt(blocks)), int(s.size), seed)


def _estimate(samples, estimator: str, seed: int) -> McEstimate:
    if estimator == "mean":
        return McEstimate.from_samples(samples, seed)
    if estimator == "mom":
        return median_of_means(samples, seed=seed)
    raise ValueError(f"unknown estimator {estimator!r}")


def _default_estimator(delta: float) -> str:
    return "mom" if delta < DELTA_L2 + 1e-9 else "mean"


# ---------------------------------------------------------------------------
# gradient estimators


def bel_mc_grid(delta: float, x: float, T_list, F_list, n: int, cfg: SamplerConfig,
                estimator: str | None = None, workers: int = 1):
    """BEL estimates ``(1/T) E[F(rho_T) (D_T - x)]`` for every ``(T, F)`` from one set of paths.

    Returns ``{(T, F.label): McEstimate}``.
    """
    if not delta > 0:
        raise ValueError("the BEL representation needs delta > 0")
    est = estimator or _default_estimator(delta)
    T_list = sorted(float(t) for t in T_list)
    summ = simulate_summaries(delta, x, max(T_list), cfg, n, record_times=T_list, workers=workers)
    out = {}
    for T in T_list:
        j = int(np.searchsorted(summ.rec_times, T - 0.5 * cfg.dt))
        rho, d = summ.rho[:, j], summ.d[:, j]
        for F in F_list:
            out[(T, F.label)] = _estimate(F(rho) * (d - x) / T, est, cfg.seed)
    return out


def bel_mc_derivative(delta: float, F: TestFunction, x: float, T: float, n: int,
                      cfg: SamplerConfig, estimator: str | None = None, workers: int = 1) -> McEstimate:
    """Monte-Carlo estimate of ``d/dx P^delta_T F(x)`` via ``(1/T) E[F(rho_T) (D_T - x)]``.

    ``D_T - x`` stands in for the stochastic integral of ``eta``.  Below
    ``delta = 2(sqrt 2 - 1)`` the weight has no second moment and the default
    estimator switches to a median of 31 block means.
    """
    return bel_mc_grid(delta, x, [T], [F], n, cfg, estimator, workers)[(float(T), F.label)]


def calibrate_dt_budget(delta: float, x: float, T: float, cfg: SamplerConfig,
                        n: int = 20000, dt_coarse: float = 1e-2) -> float:
    """Constant ``c`` of the discretisation budget ``c * sqrt(dt)`` for gradient estimates.

    Fitted from the bias of ``E[D_T]`` (whose exact value is ``x``) at a coarse
    step, so no analytic derivative enters the calibration.  A bias ``b`` in
    ``E[D_T]`` moves a gradient estimate by at most ``||F|| b / T``.
    """
    coarse = cfg.replace(dt=dt_coarse, stream_id=cfg.stream_id + 7919)
    s = simulate_summaries(delta, x, T, coarse, n, stop_at_hit=True)
    e = McEstimate.from_samples(s.d[:, -1], cfg.seed)
    bias = abs(e.mean - x) + e.std_error
    return bias / (T * math.sqrt(dt_coarse))


def triple_agreement(delta, F, x, T, n, cfg, h=1e-4, fd_rel=1e-6, mc_rel=0.02,
                     budget_c: float = 0.0, estimator=None, mc: McEstimate | None = None) -> VerificationReport:
    """Analytic (dimension shift), finite-difference and BEL Monte-Carlo derivatives side by side."""
    q = SemigroupQuery(BesselDim(delta), T, x, F)
    an = derivative_semigroup(q)
    fd = fd_derivative(q, h)
    est = estimator or _default_estimator(delta)
    if mc is None:
        mc = bel_mc_derivative(delta, F, x, T, n, cfg, est)
    budget = budget_c * math.sqrt(cfg.dt)
    tol_mc = max(3 * mc.std_error, mc_rel * abs(an) + budget)
    fd_ok = abs(an - fd) <= fd_rel * abs(an) if an != 0 else abs(fd) <= 1e-9
    mc_ok = abs(mc.mean - an) <= tol_mc
    return VerificationReport(
        name="triple_agreement",
        inputs={"delta": delta, "x": x, "T": T, "F": F.label, "n": n, "dt": cfg.dt,
                "estimator": est, "h": h},
        analytic=an,
        oracle=fd,
        mc=mc,
        tolerance_spec=(f"|an-fd| <= {fd_rel:g}|an|; |an-mc| <= max(3se, {mc_rel:g}|an| + "
                        f"{budget_c:.4g}*sqrt(dt))"),
        passed=bool(fd_ok and mc_ok),
        details={"fd_rel_err": abs(an - fd) / abs(an) if an else abs(fd),
                 "mc_err": abs(mc.mean - an), "mc_tol": tol_mc, "dt_budget": budget},
    )


# ---------------------------------------------------------------------------
# absolute continuity and the martingale D


def rn_identity_check(delta: float, delta_prime: float, x: float, T: float, F: TestFunction,
                      n: int, cfg: SamplerConfig, rel: float = 0.03) -> VerificationReport:
    """``E^delta_x[F(rho_T) W_T]`` against the quadrature value ``P^{delta'}_T F(x)``.

    ``W_T = 1{T < T0} (rho_T/x)^{(d'-d)/2} exp(-((d'-d)/2)((d'+d)/4 - 1) A_T)``; for
    ``d' = d + 2`` this is ``D_T / x``.
    """
    if not delta_prime >= max(delta, 2.0):
        raise ValueError("need delta' >= max(delta, 2)")
    if not x > 0:
        raise ValueError("x must be > 0")
    s = simulate_summaries(delta, x, T, cfg, n)
    alive = ~s.absorbed
    rho = s.rho[:, -1]
    k = 0.5 * (delta_prime - delta)
    w = np.zeros(n)
    with np.errstate(over="ignore", divide="ignore"):
        w[alive] = (rho[alive] / x) ** k * np.exp(-k * ((delta_prime + delta) / 4 - 1) * s.a_at_hit[alive])
    samples = F(rho) * w
    est = McEstimate.from_samples(samples, cfg.seed)
    target = apply_kernel(SemigroupQuery(BesselDim(delta_prime), T, x, F))
    ok = est.within(target, 3.0, rel)
    return VerificationReport(
        name="rn_identity_check",
        inputs={"delta": delta, "delta_prime": delta_prime, "x": x, "T": T, "F": F.label,
                "n": n, "dt": cfg.dt},
        analytic=target,
        oracle=None,
        mc=est,
        tolerance_spec=f"|mc - P^d' F| <= max(3se, {rel:g}|P^d' F|)",
        passed=bool(ok),
        details={"absorbed": int(np.count_nonzero(~alive)),
                 "weight_mean": float(w.mean()), "weight_max": float(w.max()),
                 # for delta' = delta + 2 the weight is D_T/x, square integrable only if p(delta) > 2
                 "heavy_tail_warning": bool(k > 1.0 or BesselDim(delta).p_threshold <= 2.0)},
    )


def martingale_check(delta: float, x: float, t_grid: Sequence[float], n: int,
                     cfg: SamplerConfig, workers: int = 1) -> VerificationReport:
    """``E[D_t] = x`` within 3 standard errors at each ``t`` in ``t_grid``."""
    if not x > 0:
        raise ValueError("x must be > 0")
    t_grid = [float(t) for t in t_grid]
    per_t = {}
    worst = None
    passed = True
    positive = [t for t in t_grid if t > 0]
    if positive:
        s = simulate_summaries(delta, x, max(positive), cfg, n, record_times=positive,
                               stop_at_hit=True, workers=workers)
    for t in t_grid:
        if t == 0:
            # D_0 = x by construction
            per_t[t] = {"mean": x, "se": 0.0, "z": 0.0}
            continue
        j = int(np.searchsorted(s.rec_times, t - 0.5 * cfg.dt))
        e = McEstimate.from_samples(s.d[:, j], cfg.seed)
        z = (e.mean - x) / e.std_error
        per_t[t] = {"mean": e.mean, "se": e.std_error, "z": z}
        if worst is None or abs(z) > abs(per_t[worst]["z"]):
            worst = t
        if abs(z) > 3:
            passed = False
    mc = None
    if worst is not None:
        mc = McEstimate(per_t[worst]["mean"], per_t[worst]["se"], n, cfg.seed)
    return VerificationReport(
        name="martingale_check",
        inputs={"delta": delta, "x": x, "t_grid": t_grid, "n": n, "dt": cfg.dt},
        analytic=x,
        oracle=None,
        mc=mc,
        tolerance_spec="|mean(D_t) - x| <= 3se for every t",
        passed=passed,
        witness=None if passed else {"t": worst, "z": per_t[worst]["z"]},
        details={"per_t": {f"{t:g}": v for t, v in per_t.items()}},
    )


# ---------------------------------------------------------------------------
# tails of D_T


def hill_estimator(samples, k: int) -> float:
    """Hill estimate of the tail index from the ``k`` largest of ``samples``."""
    s = np.sort(np.asarray(samples, dtype=float))
    s = s[s > 0]
    if k < 1 or k >= s.size:
        raise ValueError("need 1 <= k < number of positive samples")
    top = s[-k:]
    thr = s[-k - 1]
    return float(1.0 / np.mean(np.log(top / thr)))


def moment_tail_diagnostics(delta: float, x: float, T: float, n: int, p_list, cfg: SamplerConfig,
                            tail_fraction: float = 0.01, n_boot: int = 200,
                            workers: int = 1) -> VerificationReport:
    """Empirical moments of ``D_T`` and a Hill tail index compared with the integrability threshold.

    Moment flags: for ``p < p(delta)`` the half-sample and full-sample moments must
    agree within 10 percent (``stable``); for ``p > p(delta)`` growth along the
    doubling schedule ``n/8, n/4, n/2, n`` is recorded (``diverging``).  Neither
    flag decides the status, which comes from the Hill estimate on the top
    ``tail_fraction`` of the positive ``D_T``: pass when its bootstrap 95% CI
    covers ``p(delta)``, fail when it misses by more than 3 CI widths,
    inconclusive otherwise or when fewer than 100 exceedances are available.
    """
    if not 0 <= delta < 1:
        raise ValueError("need 0 <= delta < 1 so that p(delta) is finite")
    p_star = BesselDim(delta).p_threshold
    s = simulate_summaries(delta, x, T, cfg, n, stop_at_hit=True, workers=workers)
    d = s.d[:, -1]
    moments = {}
    for p in p_list:
        dp = d ** p
        full = float(dp.mean())
        half = float(dp[: n // 2].mean())
        sched = [float(dp[: n // m].mean()) for m in (8, 4, 2, 1)]
        entry = {"full": full, "half": half, "schedule": sched}
        if p < p_star:
            entry["stable"] = bool(abs(half - full) <= 0.1 * abs(full))
        else:
            entry["diverging"] = bool(all(b > a for a, b in zip(sched[:-1], sched[1:])))
        moments[f"{p:g}"] = entry

    pos = d[d > 0]
    k = int(tail_fraction * pos.size)
    details = {"p_threshold": p_star, "moments": moments, "tail_fraction": tail_fraction,
               "k": k, "n_positive": int(pos.size)}
    inputs = {"delta": delta, "x": x, "T": T, "n": n, "dt": cfg.dt, "p_list": list(p_list)}
    if k < 100:
        return VerificationReport("moment_tail_diagnostics", inputs, p_star, None, None,
                                  "Hill 95% CI covers p(delta)", False, status="inconclusive",
                                  details={**details, "reason": "fewer than 100 exceedances"})
    hill = hill_estimator(pos, k)
    g = np.random.Generator(np.random.Philox(np.random.SeedSequence(cfg.seed, spawn_key=(cfg.stream_id, 99))))
    boots = np.empty(n_boot)
    for b in range(n_boot):
        r = pos[g.integers(0, pos.size, pos.size)]
        boots[b] = hill_estimator(r, k)
    lo, hi = (float(v) for v in np.percentile(boots, [2.5, 97.5]))
    width = hi - lo
    miss = max(lo - p_star, p_star - hi, 0.0)
    if miss == 0.0:
        status = "pass"
    elif miss > 3 * width:
        status = "fail"
    else:
        status = "inconclusive"
    details.update(hill=hill, ci=[lo, hi], ci_width=width, miss=miss)
    return VerificationReport(
        name="moment_tail_diagnostics",
        inputs=inputs,
        analytic=p_star,
        oracle=hill,
        mc=None,
        tolerance_spec="pass: Hill 95% CI covers p(delta); fail: misses by > 3 CI widths",
        passed=status == "pass",
        status=status,
        details=details,
    )


# ---------------------------------------------------------------------------
# behaviour at the hitting time


def eta_blowup_check(delta: float, x: float, T: float, n: int, floor_grid, cfg: SamplerConfig,
                     dt_per_floor2: float | None = 4.0, workers: int = 1) -> VerificationReport:
    """Medians over absorbed paths of ``A``, ``max eta`` and ``D`` at absorption, across floors.

    ``floor_grid`` is sorted into decreasing order.  With ``dt_per_floor2`` set,
    each floor ``e`` runs with ``dt = dt_per_floor2 * e^2`` so the step resolves
    the floor; otherwise ``cfg.dt`` is used throughout.
    """
    floors = sorted((float(f) for f in floor_grid), reverse=True)
    rows = []
    for i, eps in enumerate(floors):
        dt = cfg.dt if dt_per_floor2 is None else dt_per_floor2 * eps * eps
        c = cfg.replace(rho_floor=eps, dt=dt)
        s = simulate_summaries(delta, x, T, c, n, stop_at_hit=True, workers=workers)
        hit = s.absorbed
        if not hit.any():
            rows.append({"floor": eps, "dt": dt, "absorbed": 0})
            continue
        rows.append({
            "floor": eps, "dt": dt, "absorbed": int(hit.sum()),
            "A_median": float(np.median(s.a_at_hit[hit])),
            "max_eta_median": float(np.median(s.max_eta[hit])),
            "D_median": float(np.median(s.d_at_hit[hit])),
        })
    inputs = {"delta": delta, "x": x, "T": T, "n": n, "floors": floors,
              "dt_per_floor2": dt_per_floor2}
    if any(r["absorbed"] == 0 for r in rows):
        return VerificationReport("eta_blowup_check", inputs, None, None, None,
                                  "vacuous: not every floor saw absorbed paths", True,
                                  details={"rows": rows, "note": "vacuous"})

    def strictly(key, sign):
        v = [r[key] for r in rows]
        return all(sign * (b - a) > 0 for a, b in zip(v[:-1], v[1:]))

    a_inc = strictly("A_median", 1)
    d_dec = strictly("D_median", -1)
    eta_inc = strictly("max_eta_median", 1)
    checks = {"A_increasing": a_inc, "D_decreasing": d_dec,
              "max_eta_increasing": eta_inc, "max_eta_expected_increasing": delta < 1}
    passed = a_inc and d_dec and (eta_inc == (delta < 1))
    return VerificationReport(
        name="eta_blowup_check",
        inputs=inputs,
        analytic=None,
        oracle=None,
        mc=None,
        tolerance_spec="A median up, D median down, max-eta median up iff delta < 1, as the floor decreases",
        passed=bool(passed),
        witness=None if passed else checks,
        details={"rows": rows, "checks": checks},
    )


# ---------------------------------------------------------------------------
# dissipative baseline: Ornstein-Uhlenbeck


@numba.njit(cache=True)
def _ou_paths(Z, x, theta, dt):
    n, N = Z.shape
    sq = math.sqrt(dt)
    XT = np.empty(n)
    I = np.empty(n)
    for i in range(n):
        X = x
        s = 0.0
        for k in range(N):
            b = Z[i, k] * sq
            s += math.exp(-theta * k * dt) * b
            X += -theta * X * dt + b
        XT[i] = X
        I[i] = s
    return XT, I


def _ou_moments(theta, x, T):
    m = x * math.exp(-theta * T)
    s = math.sqrt((1 - math.exp(-2 * theta * T)) / (2 * theta))
    return m, s


def _gauss_expect(f, m, s, jumps=()):
    pts = sorted(j for j in ((jj - m) / s for jj in jumps) if -12 < j < 12)
    edges = [-12.0, *pts, 12.0]
    tot = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        tot += integrate.quad(lambda z: f(m + s * z) * math.exp(-0.5 * z * z), a, b,
                              epsabs=1e-13, epsrel=1e-12, limit=200)[0]
    return tot / math.sqrt(2 * math.pi)


def ou_semigroup(theta, phi, x, T):
    m, s = _ou_moments(theta, x, T)
    return _gauss_expect(phi, m, s, getattr(phi, "jumps", ()))


def ou_derivative_exact(theta: float, phi, x: float, T: float) -> float:
    """``d/dx E[phi(X_T)]`` for the OU process: ``(e^{-theta T}/s) E[phi(m + sZ) Z]``."""
    m, s = _ou_moments(theta, x, T)
    g = lambda y: phi(y) * (y - m) / s
    return math.exp(-theta * T) / s * _gauss_expect(g, m, s, getattr(phi, "jumps", ()))


def classical_baseline(theta: float, phi, x: float, T: float, n: int, cfg: SamplerConfig,
                       rel: float = 0.02, grid=None, bound_constant: float | None = None) -> VerificationReport:
    """BEL estimator for the Ornstein-Uhlenbeck process with drift ``-theta y``.

    Here ``eta_t = exp(-theta t)`` and the dissipativity constant is ``L = -theta``.
    The Monte-Carlo gradient is compared with the Gaussian closed form, and the
    Lipschitz bound ``C ||phi|| |x-y| / sqrt(min(T, 1))`` is checked on ``grid``
    (triples ``(x, y, T)``) with ``C = e^L`` unless ``bound_constant`` is given.
    """
    if not theta > 0:
        raise ValueError("theta must be > 0")
    N = cfg.n_steps(T)
    XT = np.empty(n)
    I = np.empty(n)
    chunk = 512
    for lo in range(0, n, chunk):
        hi = min(n, lo + chunk)
        Z = np.stack([path_rng(cfg.seed, cfg.stream_id, i).standard_normal(N) for i in range(lo, hi)])
        XT[lo:hi], I[lo:hi] = _ou_paths(Z, float(x), float(theta), cfg.dt)
    est = McEstimate.from_samples(phi(XT) * I / T, cfg.seed)
    exact = ou_derivative_exact(theta, phi, x, T)
    mc_ok = est.within(exact, 3.0, rel)

    L = -theta
    C = math.exp(L) if bound_constant is None else bound_constant
    if grid is None:
        grid = [(a, b, t) for t in (0.1, 0.5, 1.0, 2.0) for a, b in ((-1.0, 0.0), (0.0, 0.5), (-0.25, 0.25), (1.0, 2.0))]
    norm = phi.sup_norm
    worst = -math.inf
    witness = None
    for a, b, t in grid:
        lhs = abs(ou_semigroup(theta, phi, a, t) - ou_semigroup(theta, phi, b, t))
        rhs = C * norm * abs(a - b) / math.sqrt(min(t, 1.0))
        if lhs - rhs > worst:
            worst = lhs - rhs
            if lhs > rhs + 1e-12:
                witness = {"x": a, "y": b, "T": t, "lhs": lhs, "rhs": rhs}
    bound_ok = witness is None
    return VerificationReport(
        name="classical_baseline",
        inputs={"theta": theta, "phi": phi.label, "x": x, "T": T, "n": n, "dt": cfg.dt},
        analytic=exact,
        oracle=None,
        mc=est,
        tolerance_spec=(f"|mc - exact| <= max(3se, {rel:g}|exact|); "
                        f"|P_T phi(x)-P_T phi(y)| <= {C:.6g}||phi|||x-y|/sqrt(min(T,1))"),
        passed=bool(mc_ok and bound_ok),
        witness=witness,
        details={"mc_ok": bool(mc_ok), "bound_ok": bound_ok, "bound_constant": C,
                 "bound_worst_slack": worst},
    )
