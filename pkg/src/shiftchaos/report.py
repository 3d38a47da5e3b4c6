"""Machine-readable verification records."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .norms import NormResult

METRICS = ("abs", "rel", "le", "ge")


def _num(v):
    if isinstance(v, NormResult):
        return v.value
    if isinstance(v, complex):
        return abs(v)
    return float(v)


def _jsonable(v):
    if isinstance(v, NormResult):
        return v.to_dict()
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    return v


def judge(lhs, rhs, tol, metric):
    """``abs``: |lhs - rhs| <= tol; ``rel``: |lhs - rhs| <= tol * max(1, |rhs|);
    ``le``: lhs <= rhs + tol; ``ge``: lhs >= rhs - tol."""
    x, y = _num(lhs), _num(rhs)
    if metric == "abs":
        return abs(x - y) <= tol
    if metric == "rel":
        return abs(x - y) <= tol * max(1.0, abs(y))
    if metric == "le":
        return x <= y + tol
    if metric == "ge":
        return x >= y - tol
    raise ValueError(f"unknown metric {metric!r}")


@dataclass(frozen=True)
class Report:
    check: str
    spec: dict | None
    inputs: dict
    lhs: object
    rhs: object
    tol: float
    metric: str
    passed: bool
    provenance: str
    anchor: str
    note: str = field(default="")

    @classmethod
    def make(cls, check, spec, inputs, lhs, rhs, tol, metric, provenance, anchor, note=""):
        spec_d = spec.to_dict() if hasattr(spec, "to_dict") else spec
        return cls(check, spec_d, dict(inputs), lhs, rhs, float(tol), metric,
                   bool(judge(lhs, rhs, tol, metric)), provenance, anchor, note)

    def to_dict(self):
        d = {
            "check": self.check,
            "spec": self.spec,
            "inputs": {k: _jsonable(v) for k, v in self.inputs.items()},
            "lhs": _jsonable(self.lhs),
            "rhs": _jsonable(self.rhs),
            "tol": self.tol,
            "metric": self.metric,
            "pass": self.passed,
            "provenance": self.provenance,
            "anchor": self.anchor,
        }
        if self.note:
            d["note"] = self.note
        return d

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
