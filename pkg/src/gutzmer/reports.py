"""Structured results of identity checks."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

__all__ = ["Verdict", "VerificationReport", "relative_error", "to_jsonable"]


class Verdict(str, enum.Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    LOW_CONFIDENCE = "LOW_CONFIDENCE"
    INCONCLUSIVE = "INCONCLUSIVE"


def relative_error(lhs, rhs, floor: float = 1e-300) -> float:
    lhs = np.asarray(lhs, dtype=complex)
    rhs = np.asarray(rhs, dtype=complex)
    scale = max(float(np.max(np.abs(rhs), initial=0.0)), floor)
    return float(np.max(np.abs(lhs - rhs), initial=0.0) / scale)


def to_jsonable(value: Any):
    """Convert numpy scalars, arrays and complex numbers to plain JSON values."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, enum.Enum):
        return value.value
    if isinstance(value, (complex, np.complexfloating)):
        if value.imag == 0:
            return to_jsonable(float(value.real))
        return [to_jsonable(float(value.real)), to_jsonable(float(value.imag))]
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value) or math.isinf(value):
            return repr(value)
        return value
    return value


@dataclass
class VerificationReport:
    """Outcome of one check.

    ``verdict`` is PASS only when ``rel_error <= tolerance``; a check whose
    quadrature hit the node cap is downgraded to LOW_CONFIDENCE.
    """

    check_name: str
    space: str
    params: dict = field(default_factory=dict)
    lhs: Any = None
    rhs: Any = None
    rel_error: float = 0.0
    tolerance: float = 0.0
    fitted_constants: dict = field(default_factory=dict)
    verdict: Verdict = Verdict.PASS
    runtime_ms: int = 0
    notes: str = ""

    @classmethod
    def from_error(cls, check_name, space, rel_error, tolerance, *, low_confidence=False, **kw):
        rel_error = float(rel_error)
        if not math.isfinite(rel_error):
            verdict = Verdict.FAIL
        elif rel_error > tolerance:
            verdict = Verdict.FAIL
        elif low_confidence:
            verdict = Verdict.LOW_CONFIDENCE
        else:
            verdict = Verdict.PASS
        return cls(check_name=check_name, space=space, rel_error=rel_error,
                   tolerance=tolerance, verdict=verdict, **kw)

    @property
    def passed(self) -> bool:
        return self.verdict is Verdict.PASS

    def to_dict(self, include_runtime: bool = True) -> dict:
        out = {
            "check_name": self.check_name,
            "space": self.space,
            "params": self.params,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "rel_error": self.rel_error,
            "tolerance": self.tolerance,
            "fitted_constants": self.fitted_constants,
            "verdict": self.verdict,
            "notes": self.notes,
        }
        if include_runtime:
            out["runtime_ms"] = self.runtime_ms
        return to_jsonable(out)
