"""Exponent bookkeeping (p1, p2, q) and the four-way parameter case dispatch."""

from __future__ import annotations

import math
from dataclasses import dataclass, field


class ExponentDomainError(ValueError):
    """Raised when an exponent lies outside its admissible range."""


def conjugate(p: float) -> float:
    """p' with 1/p + 1/p' = 1 (p > 1)."""
    if not p > 1:
        raise ExponentDomainError(f"conjugate exponent needs p > 1, got {p}")
    return math.inf if math.isinf(p) else p / (p - 1.0)


@dataclass(frozen=True)
class ExponentSystem:
    """The exponents of the bilinear inequality and the derived quantities.

    ``r1``, ``r2`` and ``k`` are ``None`` unless their defining expression
    is positive (``q < p_i`` and ``1/q > 1/p1 + 1/p2`` respectively).
    """

    p1: float
    p2: float
    q: float

    def __post_init__(self):
        for name in ("p1", "p2"):
            v = getattr(self, name)
            if not (v > 1 and math.isfinite(v)):
                raise ExponentDomainError(f"{name} must lie in (1, inf), got {v}")
        if not (self.q > 0 and math.isfinite(self.q)):
            raise ExponentDomainError(f"q must lie in (0, inf), got {self.q}")

    @property
    def p1c(self) -> float:
        return conjugate(self.p1)

    @property
    def p2c(self) -> float:
        return conjugate(self.p2)

    def pc(self, i: int) -> float:
        return self.p1c if i == 1 else self.p2c

    def p(self, i: int) -> float:
        return self.p1 if i == 1 else self.p2

    @property
    def qc(self) -> float | None:
        return conjugate(self.q) if self.q > 1 else None

    def r(self, i: int) -> float | None:
        inv = 1.0 / self.q - 1.0 / self.p(i)
        return 1.0 / inv if inv > 0 else None

    @property
    def r1(self) -> float | None:
        return self.r(1)

    @property
    def r2(self) -> float | None:
        return self.r(2)

    @property
    def k(self) -> float | None:
        inv = 1.0 / self.q - 1.0 / self.p1 - 1.0 / self.p2
        return 1.0 / inv if inv > 0 else None

    def swapped(self) -> "ExponentSystem":
        return ExponentSystem(self.p2, self.p1, self.q)

    def to_dict(self) -> dict:
        return {"p1": self.p1, "p2": self.p2, "q": self.q}


@dataclass(frozen=True)
class CaseId:
    """Active parameter case: ``"I"``, ``"II"``, ``"III"``, ``"IV"`` or ``"NotCovered"``."""

    name: str
    swapped: bool = False
    reason: str = field(default="", compare=False)

    @property
    def covered(self) -> bool:
        return self.name != "NotCovered"

    def label(self) -> str:
        if self.name == "II":
            return "CaseII_swap" if self.swapped else "CaseII"
        if self.name == "NotCovered":
            return "NotCovered"
        return f"Case{self.name}"

    def __str__(self) -> str:
        return self.label()


def dispatch_case(exps: ExponentSystem) -> CaseId:
    p1, p2, q = exps.p1, exps.p2, exps.q
    if q <= 1:
        return CaseId("NotCovered", reason=f"q = {q:g} <= 1 lies outside every characterized case")
    lo, hi = min(p1, p2), max(p1, p2)
    if hi <= q:
        return CaseId("I")
    if lo <= q < hi:
        # the characterization is stated for p1 <= q < p2
        return CaseId("II", swapped=p2 <= q < p1)
    if 1.0 / q <= 1.0 / p1 + 1.0 / p2:
        return CaseId("III")
    return CaseId("IV")
