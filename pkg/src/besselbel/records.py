"""Result records shared by the simulation and verification layers, and their serialisation."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

__all__ = [
    "CSV_COLUMNS",
    "McEstimate",
    "VerificationReport",
    "dumps_record",
    "read_jsonl",
    "write_report",
]

CSV_COLUMNS = (
    "name", "delta", "x", "T", "n", "dt",
    "analytic", "oracle", "mc_mean", "mc_se", "passed",
)

STATUSES = ("pass", "fail", "inconclusive")


@dataclass(frozen=True)
class McEstimate:
    """Monte-Carlo mean with its standard error ``std/sqrt(n)``."""

    mean: float
    std_error: float
    n: int
    seed: int

    @classmethod
    def from_samples(cls, samples, seed: int) -> "McEstimate":
        s = np.asarray(samples, dtype=float)
        n = s.size
        if n == 0:
            raise ValueError("need at least one sample")
        se = float(s.std(ddof=1) / math.sqrt(n)) if n > 1 else math.inf
        return cls(float(s.mean()), se, int(n), int(seed))

    def within(self, target: float, n_se: float = 3.0, rel: float = 0.0, abs_: float = 0.0) -> bool:
        """True if ``|mean - target| <= max(n_se * se, rel * |target| + abs_)``."""
        tol = max(n_se * self.std_error, rel * abs(target) + abs_)
        return abs(self.mean - target) <= tol

    def to_dict(self) -> dict:
        return {"mean": self.mean, "std_error": self.std_error, "n": self.n, "seed": self.seed}


@dataclass
class VerificationReport:
    """Outcome of one quantitative check.

    ``status`` is one of ``pass``, ``fail`` or ``inconclusive``; ``passed`` is
    true only for ``pass``.
    """

    name: str
    inputs: dict
    analytic: Optional[float]
    oracle: Optional[float]
    mc: Optional[McEstimate]
    tolerance_spec: str
    passed: bool
    witness: Optional[dict] = None
    status: str = ""
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.status:
            self.status = "pass" if self.passed else "fail"
        if self.status not in STATUSES:
            raise ValueError(f"bad status {self.status!r}")
        if self.passed != (self.status == "pass"):
            raise ValueError("passed must agree with status")

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "inputs": self.inputs,
            "analytic": self.analytic,
            "oracle": self.oracle,
            "mc": None if self.mc is None else self.mc.to_dict(),
            "tolerance_spec": self.tolerance_spec,
            "passed": self.passed,
            "status": self.status,
            "witness": self.witness,
            "details": self.details,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "VerificationReport":
        mc = d.get("mc")
        return cls(
            name=d["name"],
            inputs=d["inputs"],
            analytic=d["analytic"],
            oracle=d["oracle"],
            mc=None if mc is None else McEstimate(**mc),
            tolerance_spec=d["tolerance_spec"],
            passed=d["passed"],
            witness=d.get("witness"),
            status=d.get("status", ""),
            details=d.get("details") or {},
        )


def _fmt_float(v: float) -> str:
    if math.isnan(v):
        return "NaN"
    if math.isinf(v):
        return "Infinity" if v > 0 else "-Infinity"
    return format(v, ".17g")


def _encode(obj: Any) -> str:
    # json.dumps with every float written at 17 significant digits
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        items = (f"{json.dumps(str(k))}: {_encode(v)}" for k, v in obj.items())
        return "{" + ", ".join(items) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_encode(v) for v in obj) + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps_record(report: VerificationReport) -> str:
    return _encode(report.to_dict())


def read_jsonl(path) -> list:
    out = []
    with open(path) as fh:
        for line in fh:
            if line.strip():
                out.append(VerificationReport.from_dict(json.loads(line)))
    return out


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return _fmt_float(float(v))
    return str(v)


def _csv_row(r: VerificationReport) -> list:
    inp = r.inputs
    n = r.mc.n if r.mc is not None else inp.get("n")
    return [
        r.name,
        _csv_cell(inp.get("delta")),
        _csv_cell(inp.get("x")),
        _csv_cell(inp.get("T")),
        _csv_cell(n),
        _csv_cell(inp.get("dt")),
        _csv_cell(r.analytic),
        _csv_cell(r.oracle),
        _csv_cell(None if r.mc is None else r.mc.mean),
        _csv_cell(None if r.mc is None else r.mc.std_error),
        "true" if r.passed else "false",
    ]


def write_report(reports, fmt: str, out_path) -> None:
    """Write reports as a summary CSV or as JSON lines.

    Raises ``OSError`` if ``out_path`` cannot be written.
    """
    if fmt == "csv":
        with open(out_path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_COLUMNS)
            for r in reports:
                w.writerow(_csv_row(r))
    elif fmt == "jsonl":
        with open(out_path, "w") as fh:
            for r in reports:
                fh.write(dumps_record(r) + "\n")
    else:
        raise ValueError(f"unknown format {fmt!r}")
