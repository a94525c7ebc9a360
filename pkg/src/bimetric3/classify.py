"""Ten-way classification of metric pairs.

The decision tree branches on the exact signs of D3 and D2 and on the
discrete sigma invariants.  Conditions are mutually exclusive and
exhaustive, so every valid EXACT pair lands in exactly one class.
Float-mode classification lives in ``numeric``; the equalities here are
only decidable exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .errors import PreconditionViolated
from .invariants import InvariantReport, MetricPair, invariant_report


class ClassId(str, Enum):
    T1_THREE_REAL_DISTINCT = "T1_THREE_REAL_DISTINCT"
    T2_TIMELIKE_DOUBLE = "T2_TIMELIKE_DOUBLE"
    T3_COMPLEX_PAIR = "T3_COMPLEX_PAIR"
    T4_SPACELIKE_DOUBLE_S0 = "T4_SPACELIKE_DOUBLE_S0"
    T5_SPACELIKE_DOUBLE_SPLUS = "T5_SPACELIKE_DOUBLE_SPLUS"
    T6_SPACELIKE_DOUBLE_SMINUS = "T6_SPACELIKE_DOUBLE_SMINUS"
    T7_TRIPLE_SCALAR = "T7_TRIPLE_SCALAR"
    T8_TRIPLE_R1_SPLUS = "T8_TRIPLE_R1_SPLUS"
    T9_TRIPLE_R1_SMINUS = "T9_TRIPLE_R1_SMINUS"
    T10_TRIPLE_R2 = "T10_TRIPLE_R2"

    @property
    def ordinal(self) -> int:
        return _ORDER.index(self) + 1

    @property
    def short(self) -> str:
        return f"T{self.ordinal}"

    @classmethod
    def parse(cls, text) -> "ClassId":
        """Accept the stable string, the short alias T1..T10, or 1..10."""
        s = str(text).strip()
        for cid in cls:
            if s == cid.value or s.upper() == cid.short:
                return cid
        if s.isdigit() and 1 <= int(s) <= 10:
            return _ORDER[int(s) - 1]
        raise ValueError(f"unknown class identifier: {text!r}")


_ORDER = [
    ClassId.T1_THREE_REAL_DISTINCT,
    ClassId.T2_TIMELIKE_DOUBLE,
    ClassId.T3_COMPLEX_PAIR,
    ClassId.T4_SPACELIKE_DOUBLE_S0,
    ClassId.T5_SPACELIKE_DOUBLE_SPLUS,
    ClassId.T6_SPACELIKE_DOUBLE_SMINUS,
    ClassId.T7_TRIPLE_SCALAR,
    ClassId.T8_TRIPLE_R1_SPLUS,
    ClassId.T9_TRIPLE_R1_SMINUS,
    ClassId.T10_TRIPLE_R2,
]


@dataclass(frozen=True)
class ClassConditions:
    """Human-readable echo of one row of the condition column."""

    d3_sign: str
    d2_condition: Optional[str] = None
    sigma0: Optional[int] = None
    sigma1: Optional[int] = None
    sigma2: Optional[int] = None
    sigma3: Optional[int] = None

    def as_dict(self) -> dict:
        out = {"D3": self.d3_sign}
        if self.d2_condition is not None:
            out["D2"] = self.d2_condition
        for name in ("sigma0", "sigma1", "sigma2", "sigma3"):
            val = getattr(self, name)
            if val is not None:
                out[name] = val
        return out


_CONDITIONS = {
    ClassId.T1_THREE_REAL_DISTINCT: ClassConditions(">0"),
    ClassId.T2_TIMELIKE_DOUBLE: ClassConditions("=0", ">0", sigma0=1),
    ClassId.T3_COMPLEX_PAIR: ClassConditions("<0"),
    ClassId.T4_SPACELIKE_DOUBLE_S0: ClassConditions("=0", "!=0", sigma0=-1, sigma1=0),
    ClassId.T5_SPACELIKE_DOUBLE_SPLUS: ClassConditions("=0", "!=0", sigma0=-1, sigma1=1),
    ClassId.T6_SPACELIKE_DOUBLE_SMINUS: ClassConditions("=0", "!=0", sigma0=-1, sigma1=-1),
    ClassId.T7_TRIPLE_SCALAR: ClassConditions("=0", "=0", sigma2=0),
    ClassId.T8_TRIPLE_R1_SPLUS: ClassConditions("=0", "=0", sigma2=1, sigma3=1),
    ClassId.T9_TRIPLE_R1_SMINUS: ClassConditions("=0", "=0", sigma2=1, sigma3=-1),
    ClassId.T10_TRIPLE_R2: ClassConditions("=0", "=0", sigma2=2),
}


def class_conditions(cid: ClassId) -> ClassConditions:
    return _CONDITIONS[cid]


def classify_report(report: InvariantReport) -> ClassId:
    """Map an already-computed invariant report to its class."""
    if report.d3 > 0:
        return ClassId.T1_THREE_REAL_DISTINCT
    if report.d3 < 0:
        return ClassId.T3_COMPLEX_PAIR
    if report.d2 > 0:
        if report.sigma0 == 1:
            return ClassId.T2_TIMELIKE_DOUBLE
        return {
            0: ClassId.T4_SPACELIKE_DOUBLE_S0,
            1: ClassId.T5_SPACELIKE_DOUBLE_SPLUS,
            -1: ClassId.T6_SPACELIKE_DOUBLE_SMINUS,
        }[report.sigma1]
    if report.sigma2 == 0:
        return ClassId.T7_TRIPLE_SCALAR
    if report.sigma2 == 2:
        return ClassId.T10_TRIPLE_R2
    return (
        ClassId.T8_TRIPLE_R1_SPLUS
        if report.sigma3 == 1
        else ClassId.T9_TRIPLE_R1_SMINUS
    )


def classify(pair: MetricPair) -> ClassId:
    """Classify an EXACT metric pair into one of the ten classes."""
    if pair.mode != "exact":
        raise PreconditionViolated(
            "classify requires EXACT mode; use numeric.classify_float for floats"
        )
    return classify_report(invariant_report(pair))
