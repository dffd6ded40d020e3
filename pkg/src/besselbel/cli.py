"""Command-line front end.

Every subcommand runs one check (or the whole acceptance matrix), prints the
numbers to standard output, optionally writes the reports to ``--out`` and
exits with

* 0 when every check passed,
* 2 when at least one quantitative check failed,
* 3 when nothing failed but some check was inconclusive,
* 1 on a usage, configuration or output error.

Any long option can also be supplied through a JSON file given with
``--config``; options on the command line take precedence.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field

from .kernels import BesselDim, DensityQuery, kernel_atom_delta0, transition_density
from .pathsim import SCHEMES, SamplerConfig, coupled_flow, hitting_time_scaling_sample
from .records import VerificationReport, write_report
from .semigroup import SemigroupQuery, apply_kernel, derivative_semigroup, fd_derivative
from .testfunctions import REGISTRY, get_test_function
from .verifier import (
    bel_mc_derivative,
    classical_baseline,
    martingale_check,
    moment_tail_diagnostics,
    rn_identity_check,
    triple_agreement,
)

__all__ = ["COMMANDS", "RunConfig", "UsageError", "build_parser", "main", "run"]

COMMANDS = ("density", "semigroup", "derivative", "bel-mc", "rn-check", "martingale",
            "moments", "flow", "scaling", "baseline", "full-suite")

EXIT_OK, EXIT_USAGE, EXIT_FAIL, EXIT_INCONCLUSIVE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; 2 is reserved for failed checks here
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


@dataclass
class RunConfig:
    command: str
    params: dict = field(default_factory=dict)
    seed: int = 0
    out_path: str | None = None
    format: str = "csv"
    workers: int = 1


# ---------------------------------------------------------------------------
# parsing


def _floats(s: str):
    try:
        return [float(v) for v in s.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {s!r}")


def _ints(s: str):
    try:
        return [int(v) for v in s.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {s!r}")


def _default_seed() -> int:
    v = os.environ.get("BESSEL_BEL_SEED")
    if v is None:
        return 0
    try:
        return int(v)
    except ValueError:
        return -1  # rejected during validation


def _add_common(p):
    g = p.add_argument_group("run options")
    g.add_argument("--config", help="JSON file supplying any of these options")
    g.add_argument("--seed", type=int, default=_default_seed(),
                   help="64-bit unsigned seed (default: $BESSEL_BEL_SEED or 0)")
    g.add_argument("--out", dest="out", help="write reports to this path")
    g.add_argument("--format", choices=("csv", "jsonl"), default="csv", help="report format")
    g.add_argument("--workers", type=int, default=os.cpu_count() or 1,
                   help="maximum worker processes (>= 1; results do not depend on it)")


def _add_sampler(p, dt=1e-3):
    g = p.add_argument_group("path sampler")
    g.add_argument("--dt", type=float, default=dt, help="time step (> 0)")
    g.add_argument("--rho-floor", type=float, default=1e-6, help="absorption threshold (0 < floor < 0.1)")
    g.add_argument("--scheme", choices=SCHEMES, default=SCHEMES[0], help="discretisation scheme")
    g.add_argument("--stream-id", type=int, default=0, help="64-bit unsigned stream identifier")


def _add_F(p, flag="--f", default="exp_neg_y2"):
    p.add_argument(flag, default=default, choices=REGISTRY, help="bounded test function")
    p.add_argument("--a", type=float, default=1.0, help="level of indicator_0_a (>= 0)")
    p.add_argument("--lam", type=float, default=1.0, help="rate of gaussian (>= 0)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="besselbel", description=__doc__.splitlines()[0],
                     formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    sub = parser.add_subparsers(dest="command", metavar="command", parser_class=_Parser)
    fmt = argparse.ArgumentDefaultsHelpFormatter

    p = sub.add_parser("density", help="transition density p^delta_T(x, y)", formatter_class=fmt)
    p.add_argument("--delta", type=float, required=True, help="dimension (>= 0; 0 gives atom + density)")
    p.add_argument("--t", type=float, required=True, help="time (> 0)")
    p.add_argument("--x", type=float, required=True, help="start (>= 0)")
    p.add_argument("--y", type=float, required=True, help="end point (>= 0)")
    _add_common(p)

    p = sub.add_parser("semigroup", help="P^delta_T F(x) by quadrature", formatter_class=fmt)
    p.add_argument("--delta", type=float, required=True, help="dimension (>= 0)")
    p.add_argument("--x", type=float, required=True, help="start (>= 0)")
    p.add_argument("--t", type=float, required=True, help="time (> 0)")
    _add_F(p)
    _add_common(p)

    p = sub.add_parser("derivative", help="analytic, finite-difference and optional MC derivative",
                       formatter_class=fmt)
    p.add_argument("--delta", type=float, required=True, help="dimension (>= 0; > 0 with --n)")
    p.add_argument("--x", type=float, required=True, help="start (>= 0)")
    p.add_argument("--t", type=float, required=True, help="time (> 0)")
    p.add_argument("--h", type=float, default=1e-4, help="finite-difference step (> 0)")
    p.add_argument("--n", type=int, default=None, help="Monte-Carlo paths (> 0); omit to skip MC")
    _add_F(p)
    _add_sampler(p)
    _add_common(p)

    p = sub.add_parser("bel-mc", help="BEL Monte-Carlo derivative against the analytic value",
                       formatter_class=fmt)
    p.add_argument("--delta", type=float, required=True, help="dimension (> 0)")
    p.add_argument("--x", type=float, required=True, help="start (> 0)")
    p.add_argument("--t", type=float, required=True, help="time (> 0)")
    p.add_argument("--n", type=int, default=100_000, help="paths (> 0)")
    p.add_argument("--estimator", choices=("auto", "mean", "mom"), default="auto",
                   help="plain mean or median of 31 block means")
    _add_F(p)
    _add_sampler(p)
    _add_common(p)

    p = sub.add_parser("rn-check", help="Radon-Nikodym reweighting from delta to delta'",
                       formatter_class=fmt)
    p.add_argument("--delta", type=float, required=True, help="dimension (>= 0)")
    p.add_argument("--delta-prime", type=float, required=True, help="target dimension (>= max(delta, 2))")
    p.add_argument("--x", type=float, required=True, help="start (> 0)")
    p.add_argument("--t", type=float, required=True, help="time (> 0)")
    p.add_argument("--n", type=int, default=100_000, help="paths (> 0)")
    p.add_argument("--rel", type=float, default=0.03, help="relative tolerance (> 0)")
    _add_F(p)
    _add_sampler(p)
    _add_common(p)

    p = sub.add_parser("martingale", help="E[D_t] = x along a time grid", formatter_class=fmt)
    p.add_argument("--delta", type=float, required=True, help="dimension (>= 0)")
    p.add_argument("--x", type=float, required=True, help="start (> 0)")
    p.add_argument("--t-grid", type=_floats, default=[0.25, 0.5, 1.0], help="comma list of times (>= 0)")
    p.add_argument("--n", type=int, default=100_000, help="paths (> 0)")
    _add_sampler(p, dt=1e-4)
    _add_common(p)

    p = sub.add_parser("moments", help="moments and Hill tail index of D_T", formatter_class=fmt)
    p.add_argument("--delta", type=float, required=True, help="dimension (0 <= delta < 1)")
    p.add_argument("--x", type=float, default=0.2, help="start (> 0)")
    p.add_argument("--t", type=float, default=1.0, help="time (> 0)")
    p.add_argument("--n", type=int, default=1_000_000, help="paths (> 0)")
    p.add_argument("--p-list", type=_floats, default=[0.5, 1.0, 1.5, 2.5], help="comma list of moment orders (> 0)")
    p.add_argument("--tail-fraction", type=float, default=0.01, help="Hill tail fraction (0 < f < 1)")
    _add_sampler(p)
    _add_common(p)

    p = sub.add_parser("flow", help="coupled flows from x and y driven by the same noise",
                       formatter_class=fmt)
    p.add_argument("--delta", type=float, required=True, help="dimension (>= 0)")
    p.add_argument("--x", type=float, required=True, help="lower start (> 0)")
    p.add_argument("--y", type=float, required=True, help="upper start (> x)")
    p.add_argument("--t", type=float, required=True, help="horizon (> 0)")
    p.add_argument("--n", type=int, default=100, help="number of coupled pairs (> 0)")
    p.add_argument("--t-eval", type=float, default=None, help="time for the difference quotient (> 0)")
    _add_sampler(p)
    _add_common(p)

    p = sub.add_parser("scaling", help="KS test of T0(y)/y^2 against T0(1)", formatter_class=fmt)
    p.add_argument("--delta", type=float, required=True, help="dimension (0 <= delta < 2)")
    p.add_argument("--y", type=float, required=True, help="start (> 0)")
    p.add_argument("--n", type=int, default=10_000, help="samples per start (> 0)")
    p.add_argument("--cap-factor", type=float, default=50.0, help="censoring horizon / start^2 (> 0)")
    _add_sampler(p)
    _add_common(p)

    p = sub.add_parser("baseline", help="Ornstein-Uhlenbeck BEL baseline", formatter_class=fmt)
    p.add_argument("--theta", type=float, default=1.0, help="mean reversion (> 0)")
    p.add_argument("--x", type=float, default=0.0, help="start (real)")
    p.add_argument("--t", type=float, default=1.0, help="time (> 0)")
    p.add_argument("--n", type=int, default=100_000, help="paths (> 0)")
    p.add_argument("--bound-constant", type=float, default=None,
                   help="constant of the Lipschitz bound (> 0; default e^{-theta})")
    _add_F(p, "--phi", "tanh")
    _add_sampler(p)
    _add_common(p)

    p = sub.add_parser("full-suite", help="run the whole acceptance matrix", formatter_class=fmt)
    p.add_argument("--only", type=_ints, default=None, help="comma list of criterion numbers (1-15)")
    _add_common(p)
    return parser


def parse_config(argv) -> RunConfig:
    """Parse ``argv`` into a validated :class:`RunConfig`, merging ``--config`` underneath."""
    parser = build_parser()
    # find the command and config file first so the file can satisfy required options
    pre = _Parser(prog="besselbel", add_help=False)
    pre.add_argument("command", nargs="?")
    pre.add_argument("--config")
    pre_ns, _ = pre.parse_known_args(argv)
    subs = parser._subparsers._group_actions[0].choices
    if pre_ns.config and pre_ns.command in subs:
        try:
            with open(pre_ns.config) as fh:
                file_opts = json.load(fh)
        except (OSError, json.JSONDecodeError) as e:
            raise UsageError(f"cannot read config {pre_ns.config}: {e}")
        if not isinstance(file_opts, dict):
            raise UsageError("config file must hold a JSON object")
        sub = subs[pre_ns.command]
        known = {a.dest: a for a in sub._actions}
        conv = {}
        for k, v in file_opts.items():
            dest = k.lstrip("-").replace("-", "_")
            if dest not in known or dest in ("config", "help"):
                raise UsageError(f"unknown option {k!r} in config for {pre_ns.command}")
            act = known[dest]
            if act.type is not None and v is not None:
                try:
                    if isinstance(v, list) and act.type in (_ints, _floats):
                        v = [(int if act.type is _ints else float)(i) for i in v]
                    else:
                        v = act.type(v)
                except (TypeError, ValueError, argparse.ArgumentTypeError) as e:
                    raise UsageError(f"bad value for {k!r} in config: {e}")
            if act.choices is not None and v not in act.choices:
                raise UsageError(f"bad value for {k!r} in config: {v!r}")
            conv[dest] = v
        sub.set_defaults(**conv)
        for a in sub._actions:
            if a.dest in conv:
                a.required = False
    ns = parser.parse_args(argv)
    if ns.command is None:
        parser.print_help(sys.stderr)
        raise UsageError("no command given")
    params = {k: v for k, v in vars(ns).items()
              if k not in ("command", "config", "seed", "out", "format", "workers")}
    cfg = RunConfig(ns.command, params, ns.seed, ns.out, ns.format, ns.workers)
    validate(cfg)
    return cfg


def _need(cond, msg):
    if not cond:
        raise UsageError(msg)


def validate(cfg: RunConfig) -> None:
    """Check every parameter against the preconditions of the target operation."""
    p = cfg.params
    _need(cfg.command in COMMANDS, f"unknown command {cfg.command!r}")
    _need(isinstance(cfg.seed, int) and 0 <= cfg.seed < 2**64, "seed must be a 64-bit unsigned integer")
    _need(isinstance(cfg.workers, int) and cfg.workers >= 1, "workers must be >= 1")
    _need(cfg.format in ("csv", "jsonl"), "format must be csv or jsonl")

    def pos(name):
        v = p.get(name)
        _need(v is not None and v > 0 and math.isfinite(v), f"--{name.replace('_', '-')} must be > 0")

    def nonneg(name):
        v = p.get(name)
        _need(v is not None and v >= 0 and math.isfinite(v), f"--{name.replace('_', '-')} must be >= 0")

    c = cfg.command
    if "dt" in p:
        pos("dt")
        _need(0 < p["rho_floor"] < 0.1, "--rho-floor must lie in (0, 0.1)")
        _need(0 <= p["stream_id"] < 2**64, "--stream-id must be 64-bit unsigned")
    if "a" in p:
        nonneg("a")
        nonneg("lam")
    if c == "density":
        nonneg("delta"); pos("t"); nonneg("x"); nonneg("y")
    elif c == "semigroup":
        nonneg("delta"); nonneg("x"); pos("t")
    elif c == "derivative":
        nonneg("delta"); nonneg("x"); pos("t"); pos("h")
        if p.get("n") is not None:
            pos("n")
            _need(p["delta"] > 0, "Monte-Carlo derivative needs --delta > 0")
            _need(p["x"] > 0, "Monte-Carlo derivative needs --x > 0")
    elif c == "bel-mc":
        pos("delta"); pos("x"); pos("t"); pos("n")
    elif c == "rn-check":
        nonneg("delta"); pos("x"); pos("t"); pos("n"); pos("rel")
        _need(p["delta_prime"] >= max(p["delta"], 2.0), "--delta-prime must be >= max(delta, 2)")
    elif c == "martingale":
        nonneg("delta"); pos("x"); pos("n")
        _need(len(p["t_grid"]) > 0 and all(t >= 0 for t in p["t_grid"]), "--t-grid must be non-empty, all >= 0")
    elif c == "moments":
        _need(0 <= p["delta"] < 1, "--delta must satisfy 0 <= delta < 1")
        pos("x"); pos("t"); pos("n")
        _need(all(q > 0 for q in p["p_list"]), "--p-list entries must be > 0")
        _need(0 < p["tail_fraction"] < 1, "--tail-fraction must lie in (0, 1)")
    elif c == "flow":
        nonneg("delta"); pos("x"); pos("t"); pos("n")
        _need(p["y"] > p["x"], "--y must exceed --x")
        if p.get("t_eval") is not None:
            pos("t_eval")
    elif c == "scaling":
        _need(0 <= p["delta"] < 2, "--delta must satisfy 0 <= delta < 2")
        pos("y"); pos("n"); pos("cap_factor")
    elif c == "baseline":
        pos("theta"); pos("t"); pos("n")
        _need(math.isfinite(p["x"]), "--x must be finite")
        if p.get("bound_constant") is not None:
            pos("bound_constant")
    elif c == "full-suite":
        if p.get("only"):
            _need(all(1 <= k <= 15 for k in p["only"]), "--only takes criterion numbers 1-15")


# ---------------------------------------------------------------------------
# dispatch


def _sampler(cfg: RunConfig) -> SamplerConfig:
    p = cfg.params
    return SamplerConfig(dt=p["dt"], rho_floor=p["rho_floor"], scheme=p["scheme"],
                         seed=cfg.seed, stream_id=p["stream_id"])


def _F(p, key="f"):
    return get_test_function(p[key], a=p["a"], lam=p["lam"])


def _info(name, inputs, value, spec="value only") -> VerificationReport:
    return VerificationReport(name, inputs, value, None, None, spec, True)


def _say(*a):
    print(*a, file=sys.stdout, flush=True)


def _cmd_density(cfg):
    p = cfg.params
    inputs = {"delta": p["delta"], "x": p["x"], "T": p["t"], "y": p["y"]}
    if p["delta"] == 0.0:
        atom, dens = kernel_atom_delta0(p["t"], p["x"])
        v = dens(p["y"])
        _say(f"atom\t{atom:.17g}")
        _say(f"density\t{v:.17g}")
        r = _info("density", inputs, v)
        r.details["atom"] = atom
        return [r]
    v = transition_density(DensityQuery(BesselDim(p["delta"]), p["t"], p["x"], p["y"]))
    _say(f"{v:.17g}")
    return [_info("density", inputs, v)]


def _cmd_semigroup(cfg):
    p = cfg.params
    F = _F(p)
    v = apply_kernel(SemigroupQuery(BesselDim(p["delta"]), p["t"], p["x"], F))
    _say(f"{v:.17g}")
    return [_info("semigroup", {"delta": p["delta"], "x": p["x"], "T": p["t"], "F": F.label}, v)]


def _cmd_derivative(cfg):
    p = cfg.params
    F = _F(p)
    if p.get("n"):
        r = triple_agreement(p["delta"], F, p["x"], p["t"], p["n"], _sampler(cfg), h=p["h"])
        _say(f"analytic\t{r.analytic:.17g}")
        _say(f"fd\t{r.oracle:.17g}")
        _say(f"mc\t{r.mc.mean:.17g}\t+- {r.mc.std_error:.3g}")
        return [r]
    q = SemigroupQuery(BesselDim(p["delta"]), p["t"], p["x"], F)
    an = derivative_semigroup(q)
    fd = fd_derivative(q, p["h"])
    ok = abs(an - fd) <= 1e-6 * abs(an) if an != 0 else abs(fd) <= 1e-9
    _say(f"analytic\t{an:.17g}")
    _say(f"fd\t{fd:.17g}")
    return [VerificationReport("derivative", {"delta": p["delta"], "x": p["x"], "T": p["t"],
                                              "F": F.label, "h": p["h"]},
                               an, fd, None, "|an - fd| <= 1e-6 |an|", bool(ok))]


def _cmd_bel(cfg):
    p = cfg.params
    F = _F(p)
    est = None if p["estimator"] == "auto" else p["estimator"]
    r = triple_agreement(p["delta"], F, p["x"], p["t"], p["n"], _sampler(cfg), estimator=est)
    _say(f"mc\t{r.mc.mean:.17g}\t+- {r.mc.std_error:.3g}")
    _say(f"analytic\t{r.analytic:.17g}")
    return [r]


def _cmd_rn(cfg):
    p = cfg.params
    r = rn_identity_check(p["delta"], p["delta_prime"], p["x"], p["t"], _F(p), p["n"],
                          _sampler(cfg), rel=p["rel"])
    _say(f"mc\t{r.mc.mean:.17g}\t+- {r.mc.std_error:.3g}")
    _say(f"quadrature\t{r.analytic:.17g}")
    return [r]


def _cmd_martingale(cfg):
    p = cfg.params
    r = martingale_check(p["delta"], p["x"], p["t_grid"], p["n"], _sampler(cfg), cfg.workers)
    for t, v in r.details["per_t"].items():
        _say(f"t={t}\t{v['mean']:.17g}\t+- {v['se']:.3g}")
    return [r]


def _cmd_moments(cfg):
    p = cfg.params
    r = moment_tail_diagnostics(p["delta"], p["x"], p["t"], p["n"], p["p_list"], _sampler(cfg),
                                tail_fraction=p["tail_fraction"], workers=cfg.workers)
    _say(f"p(delta)\t{r.analytic:.17g}")
    if r.oracle is not None:
        lo, hi = r.details["ci"]
        _say(f"hill\t{r.oracle:.6g}\tCI [{lo:.6g}, {hi:.6g}]")
    for q, m in r.details["moments"].items():
        _say(f"E[D^{q}]\t{m['full']:.6g}")
    _say(f"status\t{r.status}")
    return [r]


def _cmd_flow(cfg):
    p = cfg.params
    sc = _sampler(cfg)
    viol, gaps, rel = 0, [], []
    for i in range(p["n"]):
        _, _, dg = coupled_flow(p["delta"], p["x"], p["y"], p["t"], sc, path_index=i, t_eval=p.get("t_eval"))
        viol += dg.violations
        if dg.k_star is not None:
            gaps.append(dg.post_coalescence_gap)
        if dg.fd_rel_error is not None:
            rel.append(dg.fd_rel_error)
    max_gap = max(gaps) if gaps else 0.0
    ok = viol == 0 and max_gap <= sc.rho_floor
    _say(f"violations\t{viol}")
    _say(f"coalesced\t{len(gaps)}\tmax gap {max_gap:.3g}")
    mean_rel = sum(rel) / len(rel) if rel else None
    if mean_rel is not None:
        _say(f"fd_vs_eta\t{mean_rel:.6g}")
    return [VerificationReport("coupled_flow", {"delta": p["delta"], "x": p["x"], "y": p["y"], "T": p["t"],
                                                "n": p["n"], "dt": sc.dt},
                               None, float(viol), None, "no violations; gap after coalescence <= floor",
                               bool(ok), details={"max_gap": max_gap, "fd_rel_mean": mean_rel})]


def _cmd_scaling(cfg):
    p = cfg.params
    s = hitting_time_scaling_sample(p["delta"], p["y"], p["n"], _sampler(cfg), cap_factor=p["cap_factor"])
    _say(f"ks\t{s.ks_statistic:.6g}\tp-value {s.pvalue:.4g}")
    _say(f"censored\t{s.censored_y}\t{s.censored_1}")
    return [VerificationReport("hitting_time_scaling", {"delta": p["delta"], "y": p["y"], "n": p["n"],
                                                        "dt": p["dt"]},
                               None, s.ks_statistic, None, "KS p-value > 0.01", s.pvalue > 0.01,
                               details={"pvalue": s.pvalue})]


def _cmd_baseline(cfg):
    p = cfg.params
    r = classical_baseline(p["theta"], _F(p, "phi"), p["x"], p["t"], p["n"], _sampler(cfg),
                           bound_constant=p.get("bound_constant"))
    _say(f"mc\t{r.mc.mean:.17g}\t+- {r.mc.std_error:.3g}")
    _say(f"exact\t{r.analytic:.17g}")
    _say(f"bound_ok\t{r.details['bound_ok']}")
    return [r]


def _cmd_suite(cfg):
    from .suite import run_suite

    results = run_suite(cfg.seed, cfg.workers, only=cfg.params.get("only"))
    reps = []
    for res in results:
        _say(f"[{res.number:2d}] {res.status.upper():12s} {res.title}: {res.summary}")
        reps.extend(res.reports)
    return reps


_DISPATCH = {
    "density": _cmd_density,
    "semigroup": _cmd_semigroup,
    "derivative": _cmd_derivative,
    "bel-mc": _cmd_bel,
    "rn-check": _cmd_rn,
    "martingale": _cmd_martingale,
    "moments": _cmd_moments,
    "flow": _cmd_flow,
    "scaling": _cmd_scaling,
    "baseline": _cmd_baseline,
    "full-suite": _cmd_suite,
}


def exit_code(reports) -> int:
    sts = {r.status for r in reports}
    if "fail" in sts:
        return EXIT_FAIL
    if "inconclusive" in sts:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def run(cfg: RunConfig) -> int:
    """Execute a validated configuration and return the exit code."""
    validate(cfg)
    if cfg.out_path:
        d = os.path.dirname(os.path.abspath(cfg.out_path))
        if not os.path.isdir(d) or not os.access(d, os.W_OK):
            raise UsageError(f"cannot write to {cfg.out_path}")
    reports = _DISPATCH[cfg.command](cfg)
    if cfg.out_path:
        write_report(reports, cfg.format, cfg.out_path)
    return exit_code(reports)


def main(argv=None) -> int:
    try:
        cfg = parse_config(argv)
        return run(cfg)
    except UsageError as e:
        print(f"besselbel: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, KeyError) as e:
        print(f"besselbel: invalid parameters: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"besselbel: I/O error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
