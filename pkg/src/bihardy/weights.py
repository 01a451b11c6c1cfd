"""Radial weights, the reduced line weights and their cumulative kernels.

All positive functions here share one small protocol: ``log(t)`` returns the
elementwise logarithm on an array, ``__call__`` the values, and ``hints``
the declared endpoint behaviour (or ``None`` when unknown).  Evaluating in
the log domain keeps sinh-power data usable far beyond double range.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from ._special import logsinh
from .asymptotics import Exponential, Growth, Hints, PowerLaw, lower_cumulative, upper_cumulative
from .exponents import ExponentDomainError, ExponentSystem
from .geometry import RadialGeometry
from .quad import (DEFAULT_CONFIG, QuadConfig, UndeterminedError, as_log_integrand,
                   classify_endpoint, log_integrate_rows)


class PositiveFunction:
    """Base class for strictly positive functions on (0, inf)."""

    hints: Hints | None = None

    def log(self, t):
        raise NotImplementedError

    def __call__(self, t):
        out = np.exp(self.log(np.asarray(t, dtype=float)))
        return float(out) if np.ndim(t) == 0 else out


@dataclass(frozen=True)
class Power(PositiveFunction):
    """r**alpha."""

    alpha: float

    def log(self, t):
        with np.errstate(divide="ignore"):
            return self.alpha * np.log(np.asarray(t, dtype=float))

    @property
    def hints(self) -> Hints:
        return Hints(self.alpha, PowerLaw(self.alpha))

    def to_dict(self) -> dict:
        return {"form": "power", "exponent": self.alpha}


@dataclass(frozen=True)
class SinhPower(PositiveFunction):
    """sinh(scale * r)**alpha."""

    alpha: float
    scale: float = 1.0

    def __post_init__(self):
        if not self.scale > 0:
            raise ValueError(f"SinhPower scale must be positive, got {self.scale}")

    def log(self, t):
        return self.alpha * logsinh(self.scale * np.asarray(t, dtype=float))

    @property
    def hints(self) -> Hints:
        return Hints(self.alpha, Exponential(self.alpha * self.scale))

    def to_dict(self) -> dict:
        return {"form": "sinh_power", "exponent": self.alpha, "scale": self.scale}


def _as_growth(g) -> Growth | None:
    if g is None or isinstance(g, Growth):
        return g
    return PowerLaw(float(g))


@dataclass(frozen=True)
class Custom(PositiveFunction):
    """A user-supplied positive function.

    ``exponents`` optionally declares ``(power at 0, behaviour at inf)``,
    where the second entry is a power exponent or a :class:`Growth`.
    Without it, integrals involving this weight fall back to slope sniffing.
    ``log=True`` means ``evaluator`` already returns log values.
    """

    evaluator: Callable
    exponents: tuple | None = None
    name: str = "custom"
    is_log: bool = False
    _log_fn: Callable = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_log_fn", as_log_integrand(self.evaluator, self.is_log))

    def log(self, t):
        return self._log_fn(np.asarray(t, dtype=float))

    @property
    def hints(self) -> Hints | None:
        if self.exponents is None:
            return None
        zero, inf = self.exponents
        return Hints(None if zero is None else float(zero), _as_growth(inf))

    def to_dict(self) -> dict:
        return {"form": "custom", "name": self.name}


RadialWeight = PositiveFunction


class Composite(PositiveFunction):
    """Product of powers of positive functions, ``prod f_j ** c_j``."""

    def __init__(self, factors: Sequence[tuple[PositiveFunction, float]], label: str = ""):
        self.factors = tuple((f, float(c)) for f, c in factors if c != 0)
        self.label = label
        hints = Hints(0.0, Growth())
        for f, c in self.factors:
            h = f.hints
            hints = hints + (h.scale(c) if h is not None else Hints())
        self.hints = None if hints.zero is None and hints.inf is None else hints

    def log(self, t):
        t = np.asarray(t, dtype=float)
        acc = np.zeros_like(t)
        for f, c in self.factors:
            acc = acc + c * f.log(t)
        return acc

    def __repr__(self) -> str:
        return f"Composite({self.label or self.factors!r})"


class Constant(PositiveFunction):
    def __init__(self, value: float = 1.0):
        if not value > 0:
            raise ValueError("Constant must be positive")
        self.value = float(value)
        self.hints = Hints(0.0, PowerLaw(0.0))

    def log(self, t):
        return np.full(np.shape(t), math.log(self.value))


class GeometryDensity(PositiveFunction):
    """Lambda(r) of a geometry as a positive function."""

    def __init__(self, geo: RadialGeometry):
        self.geo = geo
        self.hints = geo.hints

    def log(self, t):
        return self.geo.log_density(t)


@dataclass(frozen=True)
class WeightTriple:
    u: PositiveFunction
    v1: PositiveFunction
    v2: PositiveFunction

    def v(self, i: int) -> PositiveFunction:
        return self.v1 if i == 1 else self.v2

    def swapped(self) -> "WeightTriple":
        return WeightTriple(self.u, self.v2, self.v1)


@dataclass(frozen=True)
class LineWeights:
    """Reduced weights on the half-line.

    ``v_integrand[i]`` is ``V~_i ** (1 - p_i')`` and ``v_tilde[i]`` is
    ``V~_i`` itself; both are indexed by 1 and 2 through :meth:`vt`/:meth:`vi`.
    """

    u_tilde: PositiveFunction
    v_tilde1: PositiveFunction
    v_tilde2: PositiveFunction
    v_integrand1: PositiveFunction
    v_integrand2: PositiveFunction
    exps: ExponentSystem

    def vt(self, i: int) -> PositiveFunction:
        return self.v_tilde1 if i == 1 else self.v_tilde2

    def vi(self, i: int) -> PositiveFunction:
        return self.v_integrand1 if i == 1 else self.v_integrand2

    @classmethod
    def from_line(cls, u_tilde: PositiveFunction, v_integrand1: PositiveFunction,
                  v_integrand2: PositiveFunction, exps: ExponentSystem) -> "LineWeights":
        """Line data given directly by U~ and V~_i ** (1 - p_i')."""
        vt1 = Composite([(v_integrand1, 1.0 - exps.p1)], "V~1")
        vt2 = Composite([(v_integrand2, 1.0 - exps.p2)], "V~2")
        return cls(u_tilde, vt1, vt2, v_integrand1, v_integrand2, exps)

    def swapped(self) -> "LineWeights":
        return LineWeights(self.u_tilde, self.v_tilde2, self.v_tilde1, self.v_integrand2,
                           self.v_integrand1, self.exps.swapped())


def build_line_weights(geo: RadialGeometry, w: WeightTriple, exps: ExponentSystem) -> LineWeights:
    """U~ = u Lambda, V~_i = (v_i^(1-p_i') Lambda)^(1-p_i)."""
    for i in (1, 2):
        if not exps.p(i) > 1:
            raise ExponentDomainError(f"p{i} must exceed 1")
    lam = GeometryDensity(geo)
    u_tilde = Composite([(w.u, 1.0), (lam, 1.0)], "U~")
    vis = [Composite([(w.v(i), 1.0 - exps.pc(i)), (lam, 1.0)], f"v{i}^(1-p{i}') Lambda")
           for i in (1, 2)]
    vts = [Composite([(vis[i - 1], 1.0 - exps.p(i))], f"V~{i}") for i in (1, 2)]
    return LineWeights(u_tilde, vts[0], vts[1], vis[0], vis[1], exps)


# --------------------------------------------------------------------------
# cumulative kernels

GRID_LO = 1e-6
GRID_HI = 1e6
GRID_NODES = 512
_REFINE_ROUNDS = 6
_EXP_TABLE_SPAN = 2000.0


class CumulativeKernel(PositiveFunction):
    """K(t) = int_t^inf f (``kind="upper"``) or int_0^t f (``kind="lower"``).

    A divergent defining integral makes K identically +inf.  Otherwise log K
    is tabulated on a log grid and interpolated by cubic Hermite splines in
    ``x = log t`` using the exact slope ``d log K/dx = -/+ f t / K``.  A known
    exponential rate at infinity is split off before interpolation.  Outside
    the grid, K is extrapolated from its endpoint tag when one is known, and
    integrated directly otherwise.
    """

    def __init__(self, f: PositiveFunction, kind: str, cfg: QuadConfig | None = None,
                 label: str = ""):
        if kind not in ("upper", "lower"):
            raise ValueError(f"kind must be 'upper' or 'lower', got {kind!r}")
        self.f = f
        self.kind = kind
        self.cfg = cfg or DEFAULT_CONFIG
        self.label = label
        endpoint = "infinity" if kind == "upper" else "zero"
        verdict, diag = classify_endpoint(f.log, endpoint, 1.0, f.hints, self.cfg)
        if verdict == "undetermined":
            raise UndeterminedError(f"kernel {label or kind}: {diag}", endpoint)
        self.infinite = verdict == "divergent"
        self.diagnostic = diag
        fh = f.hints if f.hints is not None else Hints()
        if self.infinite:
            self.hints = None
            return
        self.hints = upper_cumulative(fh) if kind == "upper" else lower_cumulative(fh)
        inf_tag = self.hints.inf
        self._rate = inf_tag.rate if inf_tag is not None and inf_tag.is_exponential else 0.0
        self._build()

    # -- table construction -------------------------------------------------

    def _exact_log(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "upper":
            return log_integrate_rows(self.f.log, t, np.full_like(t, np.inf), self.cfg)
        return log_integrate_rows(self.f.log, np.zeros_like(t), t, self.cfg)

    def _node_data(self, x):
        t = np.exp(x)
        logk = self._exact_log(t)
        if not np.all(np.isfinite(logk)):
            bad = t[~np.isfinite(logk)]
            raise UndeterminedError(f"kernel {self.label or self.kind}: non-finite value at "
                                    f"t = {bad[0]:.3g}")
        sign = -1.0 if self.kind == "upper" else 1.0
        with np.errstate(over="ignore"):
            dlogk = sign * np.exp(self.f.log(t) + x - logk)
        return logk - self._rate * t, dlogk - self._rate * t

    def _build(self):
        hi = GRID_HI
        if self._rate:
            # past this point the split-off exponential dominates and the tag takes over
            hi = min(GRID_HI, max(10.0, _EXP_TABLE_SPAN / abs(self._rate)))
        x = np.linspace(math.log(GRID_LO), math.log(hi), GRID_NODES)
        r, dr = self._node_data(x)
        for _ in range(_REFINE_ROUNDS):
            spline = CubicHermiteSpline(x, r, dr)
            xm = 0.5 * (x[1:] + x[:-1])
            rm, drm = self._node_data(xm)
            # absolute accuracy of log K degrades with its magnitude
            tol = 2.0 * self.cfg.rel_tol + 1e-14 * np.abs(rm + self._rate * np.exp(xm))
            bad = np.abs(spline(xm) - rm) > tol
            if not np.any(bad):
                break
            x = np.concatenate([x, xm[bad]])
            r = np.concatenate([r, rm[bad]])
            dr = np.concatenate([dr, drm[bad]])
            order = np.argsort(x)
            x, r, dr = x[order], r[order], dr[order]
        self._x, self._r, self._dr = x, r, dr
        self._spline = CubicHermiteSpline(x, r, dr)
        self._zero_power = self.hints.zero
        self._inf_power = None if self.hints.inf is None else self.hints.inf.power
        if self._zero_power is None:
            self._zero_power = _stable_edge_slope(x, dr, 0)
        if self._inf_power is None and not self._rate:
            self._inf_power = _stable_edge_slope(x, dr, -1)

    # -- evaluation -----------------------------------------------------------

    @property
    def grid(self) -> np.ndarray:
        return np.exp(self._x) if not self.infinite else np.array([])

    def log(self, t):
        t = np.asarray(t, dtype=float)
        if self.infinite:
            return np.full(t.shape, np.inf)
        scalar = t.ndim == 0
        t = np.atleast_1d(t)
        with np.errstate(divide="ignore"):
            x = np.log(t)
        out = np.empty(t.shape)
        x0, x1 = self._x[0], self._x[-1]
        inside = (x >= x0) & (x <= x1)
        with np.errstate(invalid="ignore", over="ignore"):
            out[inside] = self._spline(x[inside]) + self._rate * t[inside]
            below = x < x0
            if np.any(below):
                if self._zero_power is not None:
                    # K ~ c t^e toward 0, anchored at the first node
                    k0 = self._r[0] + self._rate * math.exp(x0)
                    out[below] = k0 + self._zero_power * (x[below] - x0)
                else:
                    out[below] = self._exact_log(t[below])
            above = x > x1
            if np.any(above):
                if self._inf_power is not None:
                    # K ~ c t^power exp(rate t), anchored at the last node
                    out[above] = (self._r[-1] + self._inf_power * (x[above] - x1)
                                  + self._rate * t[above])
                else:
                    out[above] = self._exact_log(t[above])
        return out[0] if scalar else out.reshape(t.shape)

    def __repr__(self) -> str:
        state = "inf" if self.infinite else f"{len(self._x)} nodes"
        return f"CumulativeKernel({self.label or self.kind}, {state})"


def _stable_edge_slope(x, dr, edge: int, span: float = math.log(10.0), tol: float = 1e-4):
    """The log-log slope at a table edge if it is constant over the last decade."""
    near = np.abs(x - x[edge]) <= span
    s = dr[near]
    if np.ptp(s) <= tol:
        return float(dr[edge])
    return None


@dataclass(frozen=True)
class CumulativeKernels:
    U1: CumulativeKernel
    V11: CumulativeKernel
    V12: CumulativeKernel

    def V1(self, i: int) -> CumulativeKernel:
        return self.V11 if i == 1 else self.V12


def kernels(lw: LineWeights, cfg: QuadConfig | None = None) -> CumulativeKernels:
    """U1 = int_t^inf U~, V1i = int_0^t V~_i^(1-p_i')."""
    cfg = cfg or DEFAULT_CONFIG
    return CumulativeKernels(
        CumulativeKernel(lw.u_tilde, "upper", cfg, "U1"),
        CumulativeKernel(lw.v_integrand1, "lower", cfg, "V11"),
        CumulativeKernel(lw.v_integrand2, "lower", cfg, "V12"),
    )


class LineDatum:
    """Line weights plus lazily built, cached kernels.

    Derived kernels (for nested conditions) are cached by name; the cache is
    guarded so one datum can be shared by concurrent evaluators.
    """

    def __init__(self, lw: LineWeights, cfg: QuadConfig | None = None):
        self.lw = lw
        self.exps = lw.exps
        self.cfg = cfg or DEFAULT_CONFIG
        self._cache: dict = {}
        self._lock = threading.RLock()

    @classmethod
    def from_space(cls, geo: RadialGeometry, w: WeightTriple, exps: ExponentSystem,
                   cfg: QuadConfig | None = None) -> "LineDatum":
        return cls(build_line_weights(geo, w, exps), cfg)

    def cached(self, key, build: Callable):
        with self._lock:
            if key not in self._cache:
                self._cache[key] = build()
            return self._cache[key]

    @property
    def kernels(self) -> CumulativeKernels:
        return CumulativeKernels(self.U1, self.V1(1), self.V1(2))

    @property
    def U1(self) -> CumulativeKernel:
        return self.cached("U1", lambda: CumulativeKernel(self.lw.u_tilde, "upper", self.cfg, "U1"))

    def V1(self, i: int) -> CumulativeKernel:
        return self.cached(f"V1{i}", lambda: CumulativeKernel(self.lw.vi(i), "lower", self.cfg,
                                                               f"V1{i}"))

    def swapped(self) -> "LineDatum":
        return LineDatum(self.lw.swapped(), self.cfg)
