"""Machine-readable outcomes of identity checks."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import scalars
from .matrix_io import matrix_from_json, matrix_to_json, scalar_from_json, scalar_to_json
from .scalars import RATIONAL

DEFAULT_TOLERANCE = 1e-9


@dataclass(eq=False)
class IdentityReport:
    """Both sides of an identity and whether they agree.

    Exact backend: ``passed`` iff the sides are equal (deviation exactly 0)
    and any side condition holds.  Float backends: ``passed`` iff the
    max-norm relative deviation is within ``tolerance``.
    """

    identity: str
    backend: str
    lhs: object
    rhs: object
    max_abs_deviation: object
    passed: bool
    dims: dict = field(default_factory=dict)
    seed: int | None = None
    tolerance: float | None = None
    max_rel_deviation: float | None = None
    notes: str | None = None

    def to_dict(self) -> dict:
        exact = self.backend == RATIONAL
        return {
            "identity": self.identity,
            "dims": dict(self.dims),
            "seed": self.seed,
            "backend": self.backend,
            "max_abs_deviation": str(Fraction(self.max_abs_deviation)) if exact
            else repr(float(self.max_abs_deviation)),
            "max_rel_deviation": self.max_rel_deviation,
            "tolerance": self.tolerance,
            "passed": bool(self.passed),
            "lhs": _side_to_json(self.lhs, self.backend),
            "rhs": _side_to_json(self.rhs, self.backend),
            "notes": self.notes,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "IdentityReport":
        backend = d["backend"]
        dev = Fraction(d["max_abs_deviation"]) if backend == RATIONAL else float(d["max_abs_deviation"])
        return cls(
            identity=d["identity"], backend=backend,
            lhs=_side_from_json(d["lhs"], backend), rhs=_side_from_json(d["rhs"], backend),
            max_abs_deviation=dev, passed=d["passed"], dims=dict(d["dims"]), seed=d["seed"],
            tolerance=d.get("tolerance"), max_rel_deviation=d.get("max_rel_deviation"),
            notes=d.get("notes"),
        )

    @classmethod
    def from_json(cls, text: str) -> "IdentityReport":
        return cls.from_dict(json.loads(text))

    def __eq__(self, other):
        if not isinstance(other, IdentityReport):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        dims = " ".join(f"{k}={v}" for k, v in self.dims.items())
        dev = str(self.max_abs_deviation)
        if self.max_rel_deviation is not None:
            dev += f" (rel {self.max_rel_deviation:.3e})"
        return f"{status} {self.identity} [{self.backend}] {dims} deviation={dev}"


def _side_to_json(x, backend: str):
    if isinstance(x, np.ndarray):
        return {"shape": list(x.shape), "matrix": matrix_to_json(x)}
    return {"scalar": scalar_to_json(x, backend)}


def _side_from_json(d: dict, backend: str):
    if "scalar" in d:
        return scalar_from_json(d["scalar"], backend)
    shape = tuple(d["shape"])
    if 0 in shape:
        return scalars.zeros(shape, backend)
    return matrix_from_json(d["matrix"], backend)


def make_report(identity: str, lhs, rhs, backend: str, dims: dict | None = None,
                seed: int | None = None, tolerance: float = DEFAULT_TOLERANCE,
                side_condition: bool = True, notes: str | None = None,
                metric: str = "relative") -> IdentityReport:
    """Compare two sides.  Floats use ``metric`` ("relative" or "absolute")
    against ``tolerance``; rationals require exact equality."""
    dev = scalars.max_abs_deviation(lhs, rhs)
    if backend == RATIONAL:
        passed = dev == 0 and side_condition
        return IdentityReport(identity, backend, lhs, rhs, dev, passed, dict(dims or {}), seed,
                              notes=notes)
    rel = scalars.relative_deviation(lhs, rhs)
    measured = rel if metric == "relative" else float(dev)
    passed = measured <= tolerance and side_condition
    if metric != "relative":
        notes = f"{metric} tolerance" + (f"; {notes}" if notes else "")
    return IdentityReport(identity, backend, lhs, rhs, float(dev), passed, dict(dims or {}), seed,
                          tolerance=tolerance, max_rel_deviation=rel, notes=notes)
