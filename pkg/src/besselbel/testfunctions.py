"""Bounded test functions on the half line, registered by name.

A ``TestFunction`` carries its sup-norm bound and the locations of its jumps so
that quadrature can split the integration domain there.  Instances are plain
data, hence picklable for process pools.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = ["REGISTRY", "TestFunction", "gaussian", "get_test_function"]


def _one(y, p):
    return np.ones_like(y)


def _gauss(y, p):
    return np.exp(-p["lam"] * y * y)


def _cauchy(y, p):
    return 1.0 / (1.0 + y * y)


def _indicator(y, p):
    return (y <= p["a"]).astype(float)


def _tanh(y, p):
    return np.tanh(y)


def _sign(y, p):
    return np.sign(y)


_IMPL = {
    "one": (_one, lambda p: 1.0, lambda p: ()),
    "exp_neg_y2": (_gauss, lambda p: 1.0, lambda p: ()),
    "gaussian": (_gauss, lambda p: 1.0, lambda p: ()),
    "cauchy": (_cauchy, lambda p: 1.0, lambda p: ()),
    "indicator_0_a": (_indicator, lambda p: 1.0, lambda p: (p["a"],)),
    "tanh": (_tanh, lambda p: 1.0, lambda p: ()),
    "sign": (_sign, lambda p: 1.0, lambda p: (0.0,)),
}


@dataclass(frozen=True)
class TestFunction:
    """Named bounded function ``F``; calling it evaluates elementwise."""

    __test__ = False  # keep pytest from collecting this class

    name: str
    params: tuple = field(default=())

    def __post_init__(self):
        if self.name not in _IMPL:
            raise KeyError(f"unknown test function {self.name!r}")

    @property
    def _p(self) -> dict:
        return dict(self.params)

    def __call__(self, y):
        f = _IMPL[self.name][0]
        arr = np.asarray(y, dtype=float)
        out = f(arr, self._p)
        return float(out) if arr.ndim == 0 else out

    @property
    def sup_norm(self) -> float:
        return _IMPL[self.name][1](self._p)

    @property
    def jumps(self) -> tuple:
        return _IMPL[self.name][2](self._p)

    @property
    def label(self) -> str:
        if not self.params:
            return self.name
        return self.name + "(" + ",".join(f"{k}={v:g}" for k, v in self.params) + ")"


def gaussian(lam: float) -> TestFunction:
    """``exp(-lam * y**2)``."""
    if lam < 0:
        raise ValueError("lam must be >= 0")
    return TestFunction("gaussian", (("lam", float(lam)),))


def get_test_function(name: str, a: float = 1.0, lam: float = 1.0) -> TestFunction:
    """Look up a registered test function; ``a`` and ``lam`` feed the parametric ones."""
    if name == "exp_neg_y2":
        return TestFunction("exp_neg_y2", (("lam", 1.0),))
    if name == "indicator_0_a":
        if not (a >= 0 and math.isfinite(a)):
            raise ValueError("indicator level a must be finite and >= 0")
        return TestFunction("indicator_0_a", (("a", float(a)),))
    if name == "gaussian":
        return gaussian(lam)
    if name not in REGISTRY:
        raise KeyError(f"unknown test function {name!r}; known: {sorted(REGISTRY)}")
    return TestFunction(name)


REGISTRY = ("one", "exp_neg_y2", "cauchy", "indicator_0_a", "gaussian", "tanh", "sign")
