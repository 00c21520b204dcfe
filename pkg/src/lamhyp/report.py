"""Scalar comparison records produced by every identity check."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any


@dataclass(frozen=True)
class WeightedReport:
    """Outcome of comparing two numerically evaluated sides of an identity.

    ``passed`` is true exactly when ``abs_gap <= tolerance``; checks that
    carry extra conditions (translated reruns, sign tests) fold them into
    ``tolerance`` handling before building the report and keep the raw
    numbers in ``details``.
    """

    check: str
    lhs: float
    rhs: float
    abs_gap: float
    tolerance: float
    anchor: str = ""
    details: dict[str, Any] = field(default_factory=dict)

    @property
    def rel_gap(self) -> float:
        scale = max(abs(self.lhs), abs(self.rhs))
        return self.abs_gap / scale if scale > 0 else self.abs_gap

    @property
    def passed(self) -> bool:
        return bool(self.abs_gap <= self.tolerance)

    def to_dict(self) -> dict[str, Any]:
        out = {
            "check": self.check,
            "anchor": self.anchor,
            "lhs": _clean(self.lhs),
            "rhs": _clean(self.rhs),
            "abs_gap": _clean(self.abs_gap),
            "rel_gap": _clean(self.rel_gap),
            "tolerance": _clean(self.tolerance),
            "pass": self.passed,
        }
        if self.details:
            out["details"] = {k: _clean(v) for k, v in self.details.items()}
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _clean(value: Any) -> Any:
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, (int,)):
        return value
    try:
        x = float(value)
    except (TypeError, ValueError):
        return value
    if math.isnan(x) or math.isinf(x):
        return repr(x)
    return x
