"""Endpoint growth tags and the bookkeeping used for divergence pre-analysis.

A positive function is tagged by its local power exponent at 0+ and by its
growth class at infinity, ``f(t) ~ C * t**power * exp(rate * t)``.  Products
and powers of tagged functions add and scale these tags, and cumulative
integrals transform them in a known way, so composite integrands built from
weights and kernels can be classified without sampling.
"""

from __future__ import annotations

from dataclasses import dataclass

# exponent arithmetic below this size is treated as an exact zero
BALANCE_TOL = 1e-9


@dataclass(frozen=True)
class Growth:
    """Asymptotic class ``t**power * exp(rate * t)`` as t -> infinity."""

    rate: float = 0.0
    power: float = 0.0

    @property
    def is_exponential(self) -> bool:
        return abs(self.rate) > BALANCE_TOL

    def __add__(self, other: "Growth") -> "Growth":
        return Growth(self.rate + other.rate, self.power + other.power)

    def scale(self, c: float) -> "Growth":
        return Growth(c * self.rate, c * self.power)

    def __repr__(self) -> str:
        if self.is_exponential:
            if abs(self.power) > BALANCE_TOL:
                return f"Exponential({self.rate:g}, power={self.power:g})"
            return f"Exponential({self.rate:g})"
        return f"PowerLaw({self.power:g})"


def PowerLaw(exponent: float) -> Growth:
    return Growth(0.0, float(exponent))


def Exponential(rate: float) -> Growth:
    return Growth(float(rate), 0.0)


@dataclass(frozen=True)
class Hints:
    """Declared endpoint behaviour; ``None`` means unknown at that end."""

    zero: float | None = None
    inf: Growth | None = None

    def __add__(self, other: "Hints") -> "Hints":
        zero = None if self.zero is None or other.zero is None else self.zero + other.zero
        inf = None if self.inf is None or other.inf is None else self.inf + other.inf
        return Hints(zero, inf)

    def scale(self, c: float) -> "Hints":
        if c == 0:
            return Hints(0.0, Growth())
        return Hints(
            None if self.zero is None else c * self.zero,
            None if self.inf is None else self.inf.scale(c),
        )


UNKNOWN = Hints()


def converges_at_zero(exponent: float) -> bool:
    """t**e is integrable at 0+ iff e > -1; the borderline is divergent."""
    return exponent > -1.0 + BALANCE_TOL


def converges_at_inf(g: Growth) -> bool:
    if g.is_exponential:
        return g.rate < 0
    return g.power < -1.0 - BALANCE_TOL


def upper_cumulative(h: Hints) -> Hints:
    """Tags of K(t) = int_t^inf f, given tags of f (assumed convergent at inf)."""
    inf = None
    if h.inf is not None and converges_at_inf(h.inf):
        inf = h.inf if h.inf.is_exponential else PowerLaw(h.inf.power + 1.0)
    zero = None
    if h.zero is not None:
        if h.zero < -1.0 - BALANCE_TOL:
            zero = h.zero + 1.0
        elif h.zero > -1.0 + BALANCE_TOL:
            zero = 0.0
        # e == -1 gives a logarithm: no power tag
    return Hints(zero, inf)


def lower_cumulative(h: Hints) -> Hints:
    """Tags of K(t) = int_0^t f, given tags of f (assumed convergent at 0)."""
    zero = None
    if h.zero is not None and converges_at_zero(h.zero):
        zero = h.zero + 1.0
    inf = None
    if h.inf is not None:
        g = h.inf
        if g.is_exponential:
            inf = g if g.rate > 0 else PowerLaw(0.0)
        elif g.power > -1.0 + BALANCE_TOL:
            inf = PowerLaw(g.power + 1.0)
        elif g.power < -1.0 - BALANCE_TOL:
            inf = PowerLaw(0.0)
    return Hints(zero, inf)
