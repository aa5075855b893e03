"""Actual-versus-bound records produced by every audit."""

from __future__ import annotations

import math
from dataclasses import dataclass, field


@dataclass
class BoundReport:
    actual: complex
    actual_abs: float
    bound: float
    ratio: float
    bound_formula: str
    extras: dict = field(default_factory=dict)

    def row(self) -> dict:
        out = {
            "actual_re": self.actual.real,
            "actual_im": self.actual.imag,
            "abs": self.actual_abs,
            "bound": self.bound,
            "ratio": self.ratio,
            "formula": self.bound_formula,
        }
        for k, v in self.extras.items():
            if isinstance(v, (int, float, str, bool)):
                out[k] = v
        return out


def make_report(actual: complex, bound: float, formula: str, **extras) -> BoundReport:
    actual = complex(actual)
    a = abs(actual)
    ratio = a / bound if bound > 0 else math.inf
    return BoundReport(actual, a, float(bound), ratio, formula, extras)
