"""Line and space forms of the ball-restricted bilinear Hardy functional.

Radial test functions live on the half-line either as space densities
``f(r)`` (:class:`RadialFunction`) or as line densities ``F(s)``
(:class:`LineFunction`).  :func:`project` multiplies by the surface density,
:func:`lift` builds the space function for which Hoelder's inequality is
sharp, and the ``lhs_*``/``rhs_*`` functionals evaluate both sides of the
inequality through independent quadrature paths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .asymptotics import Hints
from .exponents import ExponentSystem
from .geometry import RadialGeometry
from .quad import QuadConfig, integrate, log_integrate_rows
from .weights import LineWeights, PositiveFunction, WeightTriple, build_line_weights


class RatioDomainError(ArithmeticError):
    """Raised when an inequality ratio has a zero or infinite denominator."""


class LiftDomainError(ArithmeticError):
    """Raised when the lift is undefined on the support of F."""


def _log_clip(log_vals, t, lo, hi):
    out = np.where((t > lo) & (t < hi), log_vals, -np.inf)
    return out


class LineFunction:
    """A nonnegative function on (0, inf) with support inside ``[lo, hi]``.

    ``log(t)`` returns log F (``-inf`` off the support) and
    ``log_cumulative(tau)`` returns log of ``int_0^tau F``.
    """

    lo: float = 0.0
    hi: float = math.inf

    def log(self, t):
        raise NotImplementedError

    def __call__(self, t):
        out = np.exp(self.log(np.asarray(t, dtype=float)))
        return float(out) if np.ndim(t) == 0 else out

    def log_cumulative(self, tau):
        tau = np.atleast_1d(np.asarray(tau, dtype=float))
        out = np.full(tau.shape, -np.inf)
        inside = tau > self.lo
        if np.any(inside):
            top = np.minimum(tau[inside], self.hi)
            log_f = self.log
            out[inside] = log_integrate_rows(log_f, np.full(top.shape, self.lo), top)
        return out

    @property
    def is_zero(self) -> bool:
        return False

    def zero_exponent(self) -> float | None:
        """Power of F at 0+ when the support reaches 0."""
        return None

    def scaled(self, c: float) -> "LineFunction":
        return ScaledLine(self, c)


@dataclass(frozen=True)
class PowerTrunc(LineFunction):
    """``coef * t**a`` on ``(lo, hi)``, zero elsewhere; ``lo = 0`` needs ``a > -1``."""

    a: float
    lo: float
    hi: float
    coef: float = 1.0

    def __post_init__(self):
        if not (0.0 <= self.lo < self.hi < math.inf):
            raise ValueError(f"PowerTrunc needs 0 <= lo < hi < inf, got ({self.lo}, {self.hi})")
        if self.lo == 0.0 and not self.a > -1.0:
            raise ValueError("PowerTrunc with lo = 0 needs a > -1")
        if not self.coef >= 0:
            raise ValueError("PowerTrunc coefficient must be nonnegative")

    @property
    def is_zero(self) -> bool:
        return self.coef == 0.0

    def log(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore"):
            vals = math.log(self.coef) + self.a * np.log(t) if self.coef else np.full(t.shape, -np.inf)
        return _log_clip(vals, t, self.lo, self.hi)

    def log_cumulative(self, tau):
        tau = np.atleast_1d(np.asarray(tau, dtype=float))
        out = np.full(tau.shape, -np.inf)
        if self.coef == 0.0:
            return out
        inside = tau > self.lo
        top = np.minimum(tau[inside], self.hi)
        e = self.a + 1.0
        lc = math.log(self.coef)
        if self.lo == 0.0:
            out[inside] = lc + e * np.log(top) - math.log(e)
        elif abs(e) < 1e-12:
            out[inside] = lc + np.log(np.log(top / self.lo))
        else:
            # (top^e - lo^e)/e computed without cancellation
            d = e * (np.log(top) - math.log(self.lo))
            with np.errstate(divide="ignore"):
                out[inside] = lc + e * math.log(self.lo) + np.log(np.expm1(d) / e)
        return out

    def zero_exponent(self) -> float | None:
        return self.a if self.lo == 0.0 else None

    def scaled(self, c: float) -> "PowerTrunc":
        return PowerTrunc(self.a, self.lo, self.hi, self.coef * c)

    def dilated(self, lam: float) -> "PowerTrunc":
        return PowerTrunc(self.a, self.lo * lam, self.hi * lam, self.coef)


class CustomLine(LineFunction):
    """A line function given by a log-evaluator on a support ``[lo, hi]``."""

    def __init__(self, log_fn: Callable, lo: float, hi: float, label: str = "custom",
                 zero_exponent: float | None = None):
        if not (0.0 <= lo < hi < math.inf):
            raise ValueError(f"support must satisfy 0 <= lo < hi < inf, got ({lo}, {hi})")
        if lo == 0.0 and zero_exponent is None:
            raise ValueError("a support reaching 0 needs a declared exponent there")
        self._log_fn = log_fn
        self.lo = float(lo)
        self.hi = float(hi)
        self.label = label
        self._zero = zero_exponent

    def log(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = np.asarray(self._log_fn(np.clip(t, self.lo, self.hi) if self.lo > 0 else t),
                              dtype=float)
        return _log_clip(np.broadcast_to(vals, t.shape), t, self.lo, self.hi)

    def log_cumulative(self, tau):
        tau = np.atleast_1d(np.asarray(tau, dtype=float))
        out = np.full(tau.shape, -np.inf)
        inside = tau > self.lo
        if np.any(inside):
            top = np.minimum(tau[inside], self.hi)
            lo = np.full(top.shape, self.lo)
            out[inside] = log_integrate_rows(self._log_fn, lo, top)
        return out

    def zero_exponent(self) -> float | None:
        return self._zero if self.lo == 0.0 else None

    def __repr__(self) -> str:
        return f"CustomLine({self.label}, [{self.lo:g}, {self.hi:g}])"


class ScaledLine(LineFunction):
    def __init__(self, base: LineFunction, c: float):
        if not c >= 0:
            raise ValueError("scale factor must be nonnegative")
        self.base = base
        self.c = float(c)
        self.lo, self.hi = base.lo, base.hi

    @property
    def is_zero(self) -> bool:
        return self.c == 0.0 or self.base.is_zero

    def _lc(self):
        return math.log(self.c) if self.c else -math.inf

    def log(self, t):
        return self.base.log(t) + self._lc()

    def log_cumulative(self, tau):
        return self.base.log_cumulative(tau) + self._lc()

    def zero_exponent(self):
        return self.base.zero_exponent()


ZERO = PowerTrunc(0.0, 1.0, 2.0, 0.0)


class RadialFunction:
    """A nonnegative radial function ``f(r)`` on the space, supported in ``[lo, hi]``."""

    def __init__(self, log_fn: Callable, lo: float = 0.0, hi: float = 1.0, label: str = "f",
                 zero_exponent: float | None = None):
        if not (0.0 <= lo < hi < math.inf):
            raise ValueError(f"support must satisfy 0 <= lo < hi < inf, got ({lo}, {hi})")
        self._log_fn = log_fn
        self.lo, self.hi = float(lo), float(hi)
        self.label = label
        self.zero_exp = zero_exponent

    @classmethod
    def zero(cls) -> "RadialFunction":
        return cls(lambda r: np.full(np.shape(r), -np.inf), 1.0, 2.0, "0")

    @classmethod
    def indicator(cls, lo: float, hi: float) -> "RadialFunction":
        return cls(lambda r: np.zeros(np.shape(r)), lo, hi, f"1({lo:g},{hi:g})",
                   0.0 if lo == 0 else None)

    @classmethod
    def power(cls, a: float, lo: float, hi: float) -> "RadialFunction":
        return cls(lambda r: a * np.log(r), lo, hi, f"r^{a:g}", a if lo == 0 else None)

    def log(self, r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = np.asarray(self._log_fn(r), dtype=float)
        return _log_clip(np.broadcast_to(vals, r.shape), r, self.lo, self.hi)

    def __call__(self, r):
        out = np.exp(self.log(np.asarray(r, dtype=float)))
        return float(out) if np.ndim(r) == 0 else out


# --------------------------------------------------------------------------
# project / lift


def project(f: RadialFunction, geo: RadialGeometry) -> LineFunction:
    """F(s) = f(s) Lambda(s)."""
    zero = None
    if f.lo == 0.0:
        zero = (f.zero_exp if f.zero_exp is not None else 0.0) + geo.tail_profile()[0]

    def log_F(s):
        s = np.asarray(s, dtype=float)
        return f.log(s) + geo.log_density(s)

    return CustomLine(log_F, f.lo, f.hi, f"project({f.label})", zero)


def lift(F: LineFunction, geo: RadialGeometry, weights: WeightTriple, exps: ExponentSystem,
         i: int) -> RadialFunction:
    """f = F v_i^(1-p_i') V~_i^(1/(p_i-1)), the Hoelder-extremal lift of F."""
    lw = build_line_weights(geo, weights, exps)
    v = weights.v(i)
    vt = lw.vt(i)
    pc = exps.pc(i)
    p = exps.p(i)
    probe = np.geomspace(max(F.lo, 1e-300) if F.lo > 0 else min(1e-6, F.hi / 2), F.hi, 17)
    with np.errstate(all="ignore"):
        lv = vt.log(probe)
    if not np.all(np.isfinite(lv)):
        raise LiftDomainError(f"V~{i} is zero or infinite on the support of F")

    def log_f(r):
        r = np.asarray(r, dtype=float)
        with np.errstate(invalid="ignore"):
            return F.log(r) + (1.0 - pc) * v.log(r) + vt.log(r) / (p - 1.0)

    zero = None
    if F.lo == 0.0:
        fz = F.zero_exponent()
        vh = v.hints
        vth = vt.hints
        if fz is not None and vh is not None and vth is not None and vh.zero is not None \
                and vth.zero is not None:
            zero = fz + (1.0 - pc) * vh.zero + vth.zero / (p - 1.0)
        else:
            zero = 0.0
    return RadialFunction(log_f, F.lo, F.hi, f"lift{i}", zero)


# --------------------------------------------------------------------------
# functionals


def _supports(*fs):
    cuts = []
    for f in fs:
        cuts.extend([f.lo, f.hi])
    return sorted({c for c in cuts if c > 0})


def _unwrap(res) -> float:
    return res.unwrap_log()


def _log_lhs(log_G1, log_G2, log_weight, weight_hints: Hints | None, q: float, cuts,
             zero_exp, cfg) -> float:
    """log of (int_0^inf G1^q G2^q w)^(1/q) with G_i cumulative integrals."""
    def log_h(t):
        t = np.asarray(t, dtype=float)
        return q * (log_G1(t) + log_G2(t)) + log_weight(t)

    inf_tag = weight_hints.inf if weight_hints is not None else None
    zero_tag = None
    if zero_exp is not None and weight_hints is not None and weight_hints.zero is not None:
        zero_tag = q * zero_exp + weight_hints.zero
    elif zero_exp is None:
        zero_tag = 0.0  # integrand vanishes identically near 0
    hints = Hints(zero_tag, inf_tag)
    res = integrate(log_h, 0.0, math.inf, cfg, hints, log=True, breakpoints=cuts)
    return _unwrap(res) / q


def _cum_zero_exp(F1: LineFunction, F2: LineFunction):
    """Power of G1*G2 at 0+, or None when either cumulative vanishes near 0."""
    if F1.lo > 0 or F2.lo > 0:
        return None
    z1, z2 = F1.zero_exponent(), F2.zero_exponent()
    return (z1 + 1.0) + (z2 + 1.0)


def log_lhs_line(F1: LineFunction, F2: LineFunction, lw: LineWeights, q: float,
                 cfg: QuadConfig | None = None) -> float:
    if F1.is_zero or F2.is_zero:
        return -math.inf
    return _log_lhs(F1.log_cumulative, F2.log_cumulative, lw.u_tilde.log, lw.u_tilde.hints, q,
                    _supports(F1, F2), _cum_zero_exp(F1, F2), cfg)


def lhs_line(F1: LineFunction, F2: LineFunction, lw: LineWeights, q: float,
             cfg: QuadConfig | None = None) -> float:
    """(int_0^inf (int_0^t F1)^q (int_0^t F2)^q U~(t) dt)^(1/q); +inf on divergence."""
    return _exp(log_lhs_line(F1, F2, lw, q, cfg))


def log_rhs_line(F: LineFunction, v_tilde: PositiveFunction, p: float,
                 cfg: QuadConfig | None = None) -> float:
    if F.is_zero:
        return -math.inf

    def log_h(t):
        return p * F.log(t) + v_tilde.log(t)

    zero = None
    if F.lo == 0.0:
        vh = v_tilde.hints
        fz = F.zero_exponent()
        if vh is not None and vh.zero is not None and fz is not None:
            zero = p * fz + vh.zero
    res = integrate(log_h, F.lo, F.hi, cfg, Hints(zero, None), log=True)
    return _unwrap(res) / p


def rhs_line(F: LineFunction, v_tilde: PositiveFunction, p: float,
             cfg: QuadConfig | None = None) -> float:
    """(int F^p V~ dt)^(1/p)."""
    return _exp(log_rhs_line(F, v_tilde, p, cfg))


def _space_cumulative(f: RadialFunction, geo: RadialGeometry):
    """log of the ball integral int_{B(a,r)} f = int_0^r f Lambda, by quadrature."""
    def log_integrand(r):
        r = np.asarray(r, dtype=float)
        return f._log_fn(r) + geo.log_density(r)

    def log_H(r):
        r = np.atleast_1d(np.asarray(r, dtype=float))
        out = np.full(r.shape, -np.inf)
        inside = r > f.lo
        if np.any(inside):
            top = np.minimum(r[inside], f.hi)
            out[inside] = log_integrate_rows(log_integrand, np.full(top.shape, f.lo), top)
        return out

    return log_H


def log_lhs_space(f1: RadialFunction, f2: RadialFunction, geo: RadialGeometry,
                  u: PositiveFunction, q: float, cfg: QuadConfig | None = None) -> float:
    def log_w(r):
        return u.log(r) + geo.log_density(r)

    hints = None
    if u.hints is not None:
        hints = u.hints + geo.hints
    zero = None
    if f1.lo == 0.0 and f2.lo == 0.0:
        m = geo.tail_profile()[0]
        zero = (f1.zero_exp or 0.0) + m + 1.0 + (f2.zero_exp or 0.0) + m + 1.0
    return _log_lhs(_space_cumulative(f1, geo), _space_cumulative(f2, geo), log_w, hints, q,
                    _supports(f1, f2), zero, cfg)


def lhs_space(f1: RadialFunction, f2: RadialFunction, geo: RadialGeometry,
              u: PositiveFunction, q: float, cfg: QuadConfig | None = None) -> float:
    """(int_X (H^B f1 . H^B f2)^q u dx)^(1/q) through the polar reduction."""
    return _exp(log_lhs_space(f1, f2, geo, u, q, cfg))


def log_rhs_space(f: RadialFunction, v: PositiveFunction, geo: RadialGeometry, p: float,
                  cfg: QuadConfig | None = None) -> float:
    def log_h(r):
        r = np.asarray(r, dtype=float)
        return p * f.log(r) + v.log(r) + geo.log_density(r)

    zero = None
    if f.lo == 0.0 and v.hints is not None and v.hints.zero is not None and f.zero_exp is not None:
        zero = p * f.zero_exp + v.hints.zero + geo.tail_profile()[0]
    res = integrate(log_h, f.lo, f.hi, cfg, Hints(zero, None), log=True)
    return _unwrap(res) / p


def rhs_space(f: RadialFunction, v: PositiveFunction, geo: RadialGeometry, p: float,
              cfg: QuadConfig | None = None) -> float:
    """(int_X f^p v dx)^(1/p)."""
    return _exp(log_rhs_space(f, v, geo, p, cfg))


def log_ratio(F1: LineFunction, F2: LineFunction, lw: LineWeights,
              cfg: QuadConfig | None = None) -> float:
    e = lw.exps
    d1 = log_rhs_line(F1, lw.v_tilde1, e.p1, cfg)
    d2 = log_rhs_line(F2, lw.v_tilde2, e.p2, cfg)
    denom = d1 + d2
    if not math.isfinite(denom):
        raise RatioDomainError(f"denominator is {'zero' if denom < 0 else 'infinite'}")
    return log_lhs_line(F1, F2, lw, e.q, cfg) - denom


def ratio(F1: LineFunction, F2: LineFunction, lw: LineWeights,
          cfg: QuadConfig | None = None) -> float:
    """LHS / (RHS1 * RHS2): a lower bound for the best constant."""
    return _exp(log_ratio(F1, F2, lw, cfg))


def _exp(v: float) -> float:
    if v == math.inf:
        return math.inf
    if v == -math.inf:
        return 0.0
    return math.exp(v) if v < 709.0 else math.inf


__all__ = [
    "LineFunction", "PowerTrunc", "CustomLine", "RadialFunction", "ZERO", "project", "lift",
    "lhs_line", "rhs_line", "lhs_space", "rhs_space", "ratio", "log_ratio", "log_lhs_line",
    "log_rhs_line", "log_lhs_space", "log_rhs_space", "RatioDomainError", "LiftDomainError"]
