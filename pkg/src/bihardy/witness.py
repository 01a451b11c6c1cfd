"""Empirical probes of the inequality: ratio search, dilation exponents, calibration.

Ratios from truncated-power test pairs are lower bounds for the best
constant.  A nonzero dilation exponent certifies an infinite constant for
power data, and the classical one-dimensional Hardy inequality with its
known sharp constant calibrates the quadrature pipeline.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .asymptotics import Hints, PowerLaw
from .classify import TOL, PowerDatum
from .quad import QuadConfig, UndeterminedError, integrate
from .reduction import PowerTrunc, RatioDomainError, log_ratio
from .weights import LineWeights, build_line_weights

TRACE_COLUMNS = ("eval_index", "a1", "a2", "log_tlo", "log_thi", "ratio")
_INVALID = 1e300


class SearchFailure(RuntimeError):
    """Raised when no evaluation in the search box produced a valid ratio."""


class UnsupportedDatum(ValueError):
    """Raised when an operation needs all-power homogeneous data."""


@dataclass(frozen=True)
class WitnessSearchConfig:
    """Search budget and box for ``(a1, a2, log t_lo, w)`` with ``t_hi = t_lo e^w``."""

    budget: int = 2000
    restarts: int = 8
    param_box: tuple[tuple[float, float], ...] = ((-3.0, 3.0), (-3.0, 3.0), (-6.0, 6.0),
                                                  (0.05, 10.0))
    seed: int = 0
    cfg: QuadConfig | None = None

    def __post_init__(self):
        if self.budget < 1 or self.restarts < 1:
            raise ValueError("budget and restarts must be positive")
        box = tuple(tuple(map(float, b)) for b in self.param_box)
        if len(box) != 4 or any(not lo < hi for lo, hi in box):
            raise ValueError("param_box needs four (lo, hi) pairs with lo < hi")
        if not box[3][0] > 0:
            raise ValueError("the width bound must be positive so that t_lo < t_hi")
        object.__setattr__(self, "param_box", box)


@dataclass
class RatioWitness:
    ratio: float
    params: dict
    evaluations: int
    trace: list = field(default_factory=list)
    best_trace: list = field(default_factory=list)

    def functions(self) -> tuple[PowerTrunc, PowerTrunc]:
        p = self.params
        lo, hi = math.exp(p["log_tlo"]), math.exp(p["log_thi"])
        return PowerTrunc(p["a1"], lo, hi), PowerTrunc(p["a2"], lo, hi)

    def to_dict(self) -> dict:
        return {"ratio": self.ratio, "params": dict(self.params), "evaluations": self.evaluations,
                "best_trace": list(self.best_trace)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def trace_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(TRACE_COLUMNS)
        for row in self.trace:
            w.writerow([row[0]] + [repr(float(v)) for v in row[1:]])
        return buf.getvalue()


def _line_weights(datum) -> LineWeights:
    if isinstance(datum, LineWeights):
        return datum
    if isinstance(datum, PowerDatum):
        return build_line_weights(datum.geometry, datum.to_weights(), datum.exps)
    if hasattr(datum, "lw"):
        return datum.lw
    raise TypeError(f"cannot build line weights from {type(datum).__name__}")


def _zero_exponent(f) -> float:
    h = f.hints
    return h.zero if h is not None and h.zero is not None else 0.0


def balance_starts(lw: LineWeights) -> list[np.ndarray]:
    """Starting exponents with F_i^p_i V~_i of net power -1 +- 0.1 near the origin."""
    e = lw.exps
    out = []
    for d1, d2 in ((-0.1, -0.1), (0.1, 0.1), (-0.1, 0.1), (0.1, -0.1)):
        a1 = (-1.0 + d1 - _zero_exponent(lw.v_tilde1)) / e.p1
        a2 = (-1.0 + d2 - _zero_exponent(lw.v_tilde2)) / e.p2
        out.append(np.array([a1, a2, -2.0, 4.0]))
    return out


def search_best_ratio(datum, cfg: WitnessSearchConfig = WitnessSearchConfig()) -> RatioWitness:
    """Multi-start bounded Nelder-Mead on -log ratio over truncated-power pairs."""
    lw = _line_weights(datum)
    box = np.array(cfg.param_box)
    lo_b, hi_b = box[:, 0], box[:, 1]
    rng = np.random.default_rng(cfg.seed)
    starts = [np.clip(s, lo_b, hi_b) for s in balance_starts(lw)]
    n_random = max(cfg.restarts - len(starts), 0)
    starts = starts[:cfg.restarts] + [rng.uniform(lo_b, hi_b) for _ in range(n_random)]
    per_start = max(cfg.budget // len(starts), 1)

    trace: list = []
    best = {"val": -math.inf, "x": None}
    best_trace: list = []

    def objective(x):
        if len(trace) >= cfg.budget:
            return _INVALID
        x = np.clip(x, lo_b, hi_b)
        a1, a2, log_lo, w = (float(v) for v in x)
        lo, hi = math.exp(log_lo), math.exp(log_lo + w)
        try:
            val = log_ratio(PowerTrunc(a1, lo, hi), PowerTrunc(a2, lo, hi), lw, cfg.cfg)
        except (RatioDomainError, UndeterminedError, ValueError, FloatingPointError):
            val = math.nan
        r = math.exp(val) if math.isfinite(val) and val < 709 else (
            math.inf if val == math.inf else (0.0 if val == -math.inf else math.nan))
        trace.append((len(trace), a1, a2, log_lo, log_lo + w, r))
        key = (val, tuple(-v for v in x))
        if not math.isnan(val) and (best["x"] is None or key > (best["val"],
                                                                  tuple(-v for v in best["x"]))):
            best["val"], best["x"] = val, x.copy()
        best_trace.append(_exp(best["val"]))
        if math.isnan(val):
            return _INVALID
        return -val if val > -math.inf else 1e200

    for x0 in starts:
        if len(trace) >= cfg.budget:
            break
        minimize(objective, x0, method="Nelder-Mead", bounds=list(zip(lo_b, hi_b)),
                 options={"maxfev": per_start, "xatol": 1e-6, "fatol": 1e-10})
    if best["x"] is None:
        raise SearchFailure("no valid ratio in the search box: every evaluation was invalid")
    a1, a2, log_lo, w = (float(v) for v in best["x"])
    params = {"a1": a1, "a2": a2, "log_tlo": log_lo, "log_thi": log_lo + w}
    return RatioWitness(_exp(best["val"]), params, len(trace), trace, best_trace)


def _exp(v: float) -> float:
    if v == -math.inf:
        return 0.0
    return math.exp(v) if v < 709 else math.inf


# --------------------------------------------------------------------------
# dilation


def dilation_exponent(datum: PowerDatum, a1: float = 0.0, a2: float = 0.0) -> float:
    """s with ratio(F(./lam)) = lam^s ratio(F) for truncated powers dilated by lam.

    Each of the three integrals is homogeneous, so s is independent of
    (a1, a2); it equals the power balance of the weights.
    """
    if not isinstance(datum, PowerDatum) or not datum.flat:
        raise UnsupportedDatum("dilation_exponent needs power weights on a flat geometry")
    e = datum.exps
    lhs = a1 + a2 + 2.0 + datum.a / e.q
    rhs = sum(a + 1.0 - datum.b(i) / e.pc(i) for i, a in ((1, a1), (2, a2)))
    s = lhs - rhs
    return 0.0 if abs(s) < TOL else s


def dilated_log_ratio(datum: PowerDatum, a1: float, a2: float, lo: float, hi: float,
                      lam: float, cfg: QuadConfig | None = None) -> float:
    lw = _line_weights(datum)
    return log_ratio(PowerTrunc(a1, lo * lam, hi * lam), PowerTrunc(a2, lo * lam, hi * lam),
                     lw, cfg)


# --------------------------------------------------------------------------
# classical Hardy calibration


def critical_exponent(p: float, eps: float) -> float:
    return -(1.0 + eps) / p


def classic_hardy_closed_form(p: float, eps: float, delta: float) -> float:
    """Exact ratio for f = x^(s_c + delta) on (0, 1)."""
    c = (p - 1.0 - eps) / p
    return (c + delta) ** (1.0 - p) / c


def classic_hardy_calibration(p: float, eps: float, delta: float,
                              cfg: QuadConfig | None = None) -> float:
    """int_0^inf (int_0^x f)^p x^(eps-p) dx / int_0^inf f^p x^eps dx by quadrature."""
    if not p > 1:
        raise ValueError("p must exceed 1")
    if not eps < p - 1:
        raise ValueError("eps must be below p - 1")
    if not delta > 0:
        raise ValueError("the denominator int_0^1 f^p x^eps diverges for delta <= 0")
    s = critical_exponent(p, eps) + delta
    if not s > -1:
        raise ValueError("the inner integral int_0^x f diverges at 0")
    F = PowerTrunc(s, 0.0, 1.0)

    def log_num(x):
        x = np.asarray(x, dtype=float)
        return p * F.log_cumulative(x).reshape(x.shape) + (eps - p) * np.log(x)

    def log_den(x):
        x = np.asarray(x, dtype=float)
        return p * F.log(x) + eps * np.log(x)

    num = integrate(log_num, 0.0, math.inf, cfg, Hints(p * (s + 1.0) + eps - p, PowerLaw(eps - p)),
                    log=True, breakpoints=(1.0,))
    den = integrate(log_den, 0.0, 1.0, cfg, Hints(p * s + eps, None), log=True)
    for name, res in (("numerator", num), ("denominator", den)):
        if not res.is_value:
            raise ValueError(f"the {name} integral is {res.outcome}: {res.diagnostic}")
    return math.exp(num.log_value - den.log_value)


def sharp_constant(p: float, eps: float) -> float:
    return (p / (p - 1.0 - eps)) ** p


__all__ = [
    "WitnessSearchConfig", "RatioWitness", "search_best_ratio", "balance_starts",
    "dilation_exponent", "dilated_log_ratio", "classic_hardy_calibration",
    "classic_hardy_closed_form", "sharp_constant", "SearchFailure", "UnsupportedDatum",
    "TRACE_COLUMNS",
]
