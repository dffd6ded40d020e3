"""The acceptance matrix: fifteen numbered criteria, each producing verification reports.

Shared by the ``full-suite`` command and the acceptance tests so both run the
same numbers.  Every criterion derives its random streams from the suite seed
and its own number, so criteria are independent of one another and of the
order in which they run.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .kernels import DELTA_L2, BesselDim, sq_bessel_laplace
from .pathsim import (
    SamplerConfig,
    coupled_flow,
    first_passage_times,
    hitting_time_scaling_sample,
    sample_exact_endpoints,
    simulate_summaries,
)
from .records import McEstimate, VerificationReport
from .rng import path_rng
from .semigroup import (
    SemigroupQuery,
    apply_kernel_err,
    derivative_semigroup,
    fd_derivative,
    strong_feller_sweep,
)
from .testfunctions import gaussian, get_test_function
from .verifier import (
    bel_mc_grid,
    calibrate_dt_budget,
    classical_baseline,
    eta_blowup_check,
    martingale_check,
    moment_tail_diagnostics,
    rn_identity_check,
    triple_agreement,
)

__all__ = ["CRITERIA", "SOFT", "CriterionResult", "run_criterion", "run_suite"]

DELTAS_KERNEL = (0.0, 0.5, 1.0, DELTA_L2, 1.5, 2.0, 3.0)
DELTAS_FD = (0.0, 0.5, 1.0, 1.5, 2.0, 3.0)
X_KERNEL = (0.0, 0.5, 1.0, 3.0)
T_KERNEL = (0.1, 1.0)
X_FD = (0.25, 1.0, 2.0)
T_FD = (0.25, 1.0)
F_FD = ("exp_neg_y2", "cauchy", "indicator_0_a")


@dataclass
class CriterionResult:
    number: int
    title: str
    status: str
    summary: str
    reports: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.status == "pass"


def _status(reports) -> str:
    sts = [r.status for r in reports]
    if "fail" in sts:
        return "fail"
    if "inconclusive" in sts:
        return "inconclusive"
    return "pass"


def _cfg(seed, number, **kw) -> SamplerConfig:
    return SamplerConfig(seed=seed, stream_id=number, **kw)


def _fd_F(name):
    return get_test_function(name, a=1.0)


# ---------------------------------------------------------------------------


def c01_normalization(seed, workers=1):
    one = get_test_function("one")
    worst, wit = 0.0, None
    for d in DELTAS_KERNEL:
        for x in X_KERNEL:
            for T in T_KERNEL:
                v, _ = apply_kernel_err(SemigroupQuery(BesselDim(d), T, x, one))
                if abs(v - 1) > worst:
                    worst, wit = abs(v - 1), {"delta": d, "x": x, "T": T, "value": v}
    r = VerificationReport("kernel_normalization", {"grid": "delta x x x T"}, 1.0, None, None,
                           "|int p dy (+ atom) - 1| <= 1e-10", worst <= 1e-10, wit,
                           details={"max_abs_err": worst})
    return [r], f"max |mass - 1| = {worst:.2e}"


def c02_bel2_vs_fd(seed, workers=1):
    reps, worst = [], 0.0
    for name in F_FD:
        F = _fd_F(name)
        for d in DELTAS_FD:
            for x in X_FD:
                for T in T_FD:
                    q = SemigroupQuery(BesselDim(d), T, x, F)
                    an = derivative_semigroup(q)
                    fd = fd_derivative(q, 1e-4)
                    rel = abs(an - fd) / abs(an)
                    worst = max(worst, rel)
                    reps.append(VerificationReport(
                        "derivative_vs_fd", {"delta": d, "x": x, "T": T, "F": F.label, "h": 1e-4},
                        an, fd, None, "|an - fd| <= 1e-6 |an|", rel <= 1e-6,
                        details={"rel_err": rel}))
    return reps, f"{len(reps)} points, max rel err {worst:.2e}"


def c03_neumann(seed, workers=1, h=1e-3):
    reps = []
    worst = 0.0
    for name in F_FD + ("one",):
        F = _fd_F(name)
        for d in DELTAS_KERNEL:
            for T in T_KERNEL + T_FD:
                q = SemigroupQuery(BesselDim(d), T, 0.0, F)
                v = derivative_semigroup(q)
                # independent check from quadrature alone: P_T F is smooth in x^2 with
                # |dP/d(x^2)| <= ||F||/T, so the one-sided quotient at h is at most 3h||F||/T
                fd = (apply_kernel_err(q.at(x=2 * h))[0] - apply_kernel_err(q.at(x=h))[0]) / h
                bound = 3 * h * F.sup_norm / T + 1e-6
                worst = max(worst, abs(fd) / bound)
                reps.append(VerificationReport(
                    "neumann_boundary", {"delta": d, "x": 0.0, "T": T, "F": F.label},
                    0.0, v, None, "derivative at x=0 is exactly 0; |(P(2h)-P(h))/h| <= 3h||F||/T",
                    v == 0.0 and abs(fd) <= bound, details={"h": h, "fd_near_0": fd, "fd_bound": bound}))
    ok = all(r.passed for r in reps)
    return reps, (f"{len(reps)} points, all exactly zero; near-origin quotient at most "
                  f"{worst:.2f} of its bound" if ok else "boundary condition violated")


def c04_laplace(seed, workers=1):
    worst, wit = 0.0, None
    n = 0
    for lam in (0.5, 1.0, 2.0):
        F = gaussian(lam)
        for d in DELTAS_KERNEL:
            for x in X_KERNEL:
                for T in T_KERNEL:
                    v, _ = apply_kernel_err(SemigroupQuery(BesselDim(d), T, x, F))
                    ref = sq_bessel_laplace(d, T, x * x, lam)
                    n += 1
                    if abs(v - ref) > worst:
                        worst, wit = abs(v - ref), {"delta": d, "x": x, "T": T, "lam": lam}
    r = VerificationReport("laplace_crosscheck", {"points": n}, None, None, None,
                           "|P_T exp(-lam y^2)(x) - Laplace closed form| <= 1e-8", worst <= 1e-8, wit,
                           details={"max_abs_err": worst})
    return [r], f"{n} points, max abs err {worst:.2e}"


def c05_exact_sampler(seed, workers=1, n=100_000, x=1.0, T=1.0):
    reps = []
    for i, d in enumerate((0.0, 0.5, 1.0, 2.0, 3.0)):
        g = path_rng(seed, 5, i)
        X = sample_exact_endpoints(d, x * x, T, n, g)
        for lam in (0.5, 1.0):
            e = McEstimate.from_samples(np.exp(-lam * X), seed)
            ref = sq_bessel_laplace(d, T, x * x, lam)
            reps.append(VerificationReport(
                "sampler_laplace", {"delta": d, "x": x, "T": T, "lam": lam, "n": n},
                ref, None, e, "|mean exp(-lam X) - closed form| <= 3se", e.within(ref)))
        if d == 0.0:
            e = McEstimate.from_samples((X == 0).astype(float), seed)
            ref = math.exp(-x * x / (2 * T))
            reps.append(VerificationReport(
                "sampler_atom", {"delta": d, "x": x, "T": T, "n": n},
                ref, None, e, "|P(X=0) - exp(-x^2/2T)| <= 3se", e.within(ref)))
    zs = [abs(r.mc.mean - r.analytic) / r.mc.std_error for r in reps]
    return reps, f"{len(reps)} checks, max |z| = {max(zs):.2f}"


def c06_martingale(seed, workers=1, n=100_000, dt=1e-4):
    reps = [martingale_check(d, 1.0, [0.25, 0.5, 1.0], n, _cfg(seed, 6, dt=dt), workers)
            for d in (0.5, 1.0, 2.0)]
    zs = [max(abs(v["z"]) for v in r.details["per_t"].values()) for r in reps]
    return reps, "max |z| per delta: " + ", ".join(f"{z:.2f}" for z in zs)


def c07_bel_triple(seed, workers=1, n=100_000, dt=1e-3):
    Fs = [get_test_function("exp_neg_y2"), get_test_function("indicator_0_a", a=1.0)]
    reps = []
    for d, est in ((1.0, "mean"), (1.5, "mean"), (2.0, "mean"), (3.0, "mean"),
                   (0.9, "mom"), (DELTA_L2, "mom")):
        cfg = _cfg(seed, 7, dt=dt)
        c = calibrate_dt_budget(d, 1.0, 1.0, cfg)
        mcs = bel_mc_grid(d, 1.0, [0.5, 1.0], Fs, n, cfg, estimator=est, workers=workers)
        for T in (0.5, 1.0):
            for F in Fs:
                r = triple_agreement(d, F, 1.0, T, n, cfg, budget_c=c, estimator=est,
                                     mc=mcs[(T, F.label)])
                r.details["budget_c"] = c
                reps.append(r)
    worst = max(r.details["mc_err"] / r.details["mc_tol"] for r in reps)
    return reps, f"{len(reps)} cells, worst |an-mc|/tol = {worst:.2f}"


def c08_radon_nikodym(seed, workers=1, n=100_000, dt=1e-3):
    cases = (
        (0.0, 2.0, get_test_function("indicator_0_a", a=1.0), 0.5, 0.5),
        (1.0, 3.0, get_test_function("exp_neg_y2"), 1.0, 0.5),
        (0.5, 2.5, get_test_function("exp_neg_y2"), 1.0, 0.5),
        (1.0, 4.0, get_test_function("exp_neg_y2"), 1.0, 0.5),
    )
    reps = [rn_identity_check(d, dp, x, T, F, n, _cfg(seed, 8, dt=dt)) for d, dp, F, x, T in cases]
    return reps, ", ".join(f"({r.inputs['delta']:g},{r.inputs['delta_prime']:g}): "
                           f"{r.mc.mean:.4f} vs {r.analytic:.4f}" for r in reps)


def c09_stochastic_integral(seed, workers=1, n=1000, dts=(1e-2, 1e-3, 1e-4)):
    reps = []
    for d in (1.0, 2.0):
        rms = []
        for dt in dts:
            cfg = _cfg(seed, 9, dt=dt, scheme="euler_sq_bessel_truncated")
            s = simulate_summaries(d, 1.0, 1.0, cfg, n)
            res = s.stoch_int[:, -1] - (s.d[:, -1] - 1.0)
            rms.append(float(np.sqrt(np.mean(res ** 2))))
        slope = float(np.polyfit(np.log(dts), np.log(rms), 1)[0])
        reps.append(VerificationReport(
            "stochastic_integral_identity",
            {"delta": d, "x": 1.0, "T": 1.0, "n": n, "dts": list(dts), "scheme": "euler_sq_bessel_truncated"},
            0.5, slope, None, "log-log slope of RMS residual in [0.35, 0.65]",
            abs(slope - 0.5) <= 0.15, details={"rms": rms}))
    return reps, ", ".join(f"delta={r.inputs['delta']:g}: slope {r.oracle:.3f}" for r in reps)


def c10_eta_trichotomy(seed, workers=1, n=1000, x=0.05):
    T = 5 * x * x
    reps = [eta_blowup_check(d, x, T, n, [1e-2, 1e-3, 1e-4], _cfg(seed, 10), workers=workers)
            for d in (0.0, 0.5, 1.0, 1.5)]
    return reps, "; ".join(
        f"delta={r.inputs['delta']:g}: " + ",".join(k for k, v in r.details["checks"].items()
                                                     if v and k != "max_eta_expected_increasing")
        for r in reps)


def c11_tail_index(seed, workers=1, n=1_000_000, x=0.2, T=1.0, dt=1e-3):
    reps = [moment_tail_diagnostics(d, x, T, n, [0.5, 1.0, 1.5, 2.5], _cfg(seed, 11, dt=dt),
                                    workers=workers)
            for d in (0.5, DELTA_L2)]
    return reps, "; ".join(
        f"delta={r.inputs['delta']:.3f}: p={r.analytic:.3f}, Hill={r.oracle:.3f} "
        f"CI=[{r.details['ci'][0]:.3f},{r.details['ci'][1]:.3f}] -> {r.status}"
        if r.oracle is not None else f"delta={r.inputs['delta']:.3f}: {r.status}"
        for r in reps)


def c12_strong_feller(seed, workers=1):
    Fs = [get_test_function("one"), get_test_function("exp_neg_y2"), get_test_function("cauchy"),
          get_test_function("indicator_0_a", a=1.0), get_test_function("indicator_0_a", a=0.5)]
    T_grid = [2.0 ** -k for k in range(7)]
    reps = []
    for d in (0.0, 0.5, DELTA_L2, 1.0, 2.0, 3.0):
        reps.append(strong_feller_sweep(BesselDim(d), T_grid, 2.0, Fs, exploratory=True, workers=workers,
                                        assert_ratio=d in (DELTA_L2, 1.0, 2.0)))
    return reps, "; ".join(
        f"delta={r.inputs['delta']:.3f}: ratio {r.details['ratio']:.2f}"
        + (f" ({r.details['mode']})" if r.details.get("mode") else "")
        for r in reps if "ratio" in r.details)


def c13_coupled_flow(seed, workers=1, n_seeds=100, n_fd=1000, dt=1e-3):
    violations = 0
    gaps = []
    for s in range(n_seeds):
        cfg = SamplerConfig(dt=dt, seed=seed + s, stream_id=13)
        for d in (0.0, 0.5, 1.0, 1.5, 2.0):
            _, _, dg = coupled_flow(d, 0.5, 1.0, 2.0, cfg)
            violations += dg.violations
            if dg.k_star is not None:
                gaps.append(dg.post_coalescence_gap)
    r1 = VerificationReport("flow_monotonicity", {"seeds": n_seeds, "n": n_seeds * 5, "dt": dt},
                            0.0, float(violations), None, "no ordering violations", violations == 0)
    max_gap = max(gaps) if gaps else 0.0
    r2 = VerificationReport("flow_coalescence", {"coalesced": len(gaps), "dt": dt}, None, max_gap, None,
                            "post-coalescence gap <= floor", max_gap <= 1e-6,
                            details={"coalesced_paths": len(gaps)})
    delta = 0.5
    t_eval = 0.3 / (2 * stats.gamma.ppf(0.5, 1 - delta / 2))  # 0.3 x median T0 from x = 1
    cfg = _cfg(seed, 13, dt=dt)
    errs = []
    for i in range(n_fd):
        _, _, dg = coupled_flow(delta, 1.0, 1.0 + 1e-4, 1.0, cfg, path_index=i, t_eval=t_eval)
        if dg.fd_rel_error is not None:
            errs.append(dg.fd_rel_error)
    mean_err = float(np.mean(errs))
    r3 = VerificationReport("flow_fd_ratio", {"delta": delta, "x": 1.0, "h": 1e-4, "t": t_eval,
                                              "n": n_fd, "dt": dt},
                            None, mean_err, None, "mean |fd/eta - 1| <= 0.05", mean_err <= 0.05,
                            details={"alive_paths": len(errs)})
    return [r1, r2, r3], (f"violations {violations}, max coalesced gap {max_gap:.1e} "
                          f"over {len(gaps)} paths, mean fd rel err {mean_err:.2e}")


def c14_hitting_scaling(seed, workers=1, n=10_000, dt=1e-3, cap=50.0):
    reps = []
    for d in (0.5, 1.0):
        for y in (0.5, 2.0):
            s = hitting_time_scaling_sample(d, y, n, _cfg(seed, 14, dt=dt), cap_factor=cap)
            # censoring against the exact law T0(1) = 1/(2G), G ~ Gamma(1 - delta/2)
            p_cens = float(stats.gamma.cdf(1 / (2 * cap), 1 - d / 2))
            se = math.sqrt(p_cens * (1 - p_cens) / n)
            cz = [abs(c / n - p_cens) / se for c in (s.censored_y, s.censored_1)]
            ok = s.pvalue > 0.01 and max(cz) <= 3
            reps.append(VerificationReport(
                "hitting_time_scaling", {"delta": d, "y": y, "n": n, "dt": dt, "cap_factor": cap},
                p_cens, s.ks_statistic, None,
                "KS p-value > 0.01; censored fractions within 3se of the exact tail",
                ok, details={"pvalue": s.pvalue, "censored_y": s.censored_y,
                             "censored_1": s.censored_1, "censor_z": cz}))
    t0 = first_passage_times(0.0, 1.0, _cfg(seed, 14, dt=dt), n, 2.0, substream=3)
    for s_ in (0.5, 1.0, 2.0):
        e = McEstimate.from_samples((t0 <= s_).astype(float), seed)
        ref = math.exp(-1 / (2 * s_))
        reps.append(VerificationReport(
            "absorption_cdf_delta0", {"delta": 0.0, "x": 1.0, "T": s_, "n": n, "dt": dt},
            ref, None, e, "|P(T0 <= s) - exp(-1/2s)| <= 3se", e.within(ref)))
    return reps, "; ".join(
        f"d={r.inputs['delta']:g},y={r.inputs['y']:g}: p={r.details['pvalue']:.3f}"
        for r in reps if r.name == "hitting_time_scaling")


def c15_classical(seed, workers=1, n=100_000, dt=1e-3):
    r = classical_baseline(1.0, get_test_function("tanh"), 0.0, 1.0, n, _cfg(seed, 15, dt=dt))
    r0 = classical_baseline(1.0, get_test_function("one"), 0.0, 1.0, n, _cfg(seed, 15, dt=dt))
    return [r, r0], f"tanh: mc {r.mc.mean:.4f} vs exact {r.analytic:.4f}; bound slack {r.details['bound_worst_slack']:.3f}"


CRITERIA = {
    1: ("kernel normalization", c01_normalization),
    2: ("dimension-shift derivative vs finite differences", c02_bel2_vs_fd),
    3: ("Neumann boundary at x=0", c03_neumann),
    4: ("Laplace transform cross-check", c04_laplace),
    5: ("exact endpoint sampler", c05_exact_sampler),
    6: ("martingale E[D_t] = x", c06_martingale),
    7: ("BEL triple agreement", c07_bel_triple),
    8: ("Radon-Nikodym identity", c08_radon_nikodym),
    9: ("stochastic-integral identity", c09_stochastic_integral),
    10: ("eta trichotomy at absorption", c10_eta_trichotomy),
    11: ("tail index of D_T (soft)", c11_tail_index),
    12: ("strong Feller sweeps", c12_strong_feller),
    13: ("coupled flow", c13_coupled_flow),
    14: ("hitting-time scaling", c14_hitting_scaling),
    15: ("classical OU baseline", c15_classical),
}
SOFT = {11}


def run_criterion(number: int, seed: int = 1, workers: int = 1) -> CriterionResult:
    title, fn = CRITERIA[number]
    reps, summary = fn(seed, workers=workers)
    return CriterionResult(number, title, _status(reps), summary, reps)


def run_suite(seed: int = 1, workers: int = 1, only=None, progress=sys.stderr):
    out = []
    for k in sorted(CRITERIA):
        if only and k not in only:
            continue
        if progress is not None:
            print(f"[{k:2d}] {CRITERIA[k][0]} ...", file=progress, flush=True)
        out.append(run_criterion(k, seed, workers))
    return out
