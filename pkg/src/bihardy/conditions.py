"""Weight conditions B1-B6, parameter case dispatch and best-constant brackets.

Every condition is evaluated in the log domain from the cumulative kernels
of a :class:`~bihardy.weights.LineDatum`.  Suprema over ``0 < t < inf`` use a
log-grid scan with golden-section polishing and edge-slope extrapolation;
integrals over the half-line go through :func:`bihardy.quad.integrate`.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import minimize_scalar

from .exponents import CaseId, ExponentSystem, dispatch_case
from .geometry import RadialGeometry
from .quad import GUARD_BAND, QuadConfig, UndeterminedError, integrate
from .weights import Composite, CumulativeKernel, LineDatum, LineWeights, WeightTriple

__all__ = [
    "CaseId", "ExponentSystem", "dispatch_case", "sup_over_t", "log_sup_over_t",
    "eval_B1", "eval_B2", "eval_B3", "eval_B4", "eval_B5", "eval_B6", "eval_B6_alt",
    "bracket_constant", "ConditionReport", "evaluate", "eval_report", "REQUIRED",
]

SUP_LO = 1e-6
SUP_HI = 1e6
SUP_NODES = 121
EDGE_SLOPE = GUARD_BAND
_EDGE_RUN = 3
_MAX_POLISH = 8

REQUIRED = {
    "I": ("B1",),
    "II": ("B1", "B2"),
    "III": ("B1", "B2", "B3"),
    "IV": ("B4", "B5", "B6", "B6_alt"),
    "NotCovered": (),
}


# --------------------------------------------------------------------------
# supremum over the half-line


def log_sup_over_t(log_g: Callable[[np.ndarray], np.ndarray]) -> tuple[float, float]:
    """(log of sup_{t>0} g, maximizing t) for ``g = exp(log_g)``.

    Returns ``(inf, edge)`` when g is +inf somewhere on the grid or keeps
    growing into an edge with log-log slope above :data:`EDGE_SLOPE`.
    """
    x = np.linspace(math.log(SUP_LO), math.log(SUP_HI), SUP_NODES)
    with np.errstate(all="ignore"):
        vals = np.asarray(log_g(np.exp(x)), dtype=float)
    if np.any(np.isnan(vals)):
        bad = np.exp(x[np.isnan(vals)][0])
        raise UndeterminedError(f"supremand undefined at t = {bad:.3g}")
    if np.any(vals == np.inf):
        return math.inf, float(np.exp(x[np.argmax(vals)]))
    if np.all(vals == -np.inf):
        return -math.inf, math.nan
    with np.errstate(invalid="ignore"):
        slopes = np.diff(vals) / np.diff(x)
    if np.all(slopes[-_EDGE_RUN:] > EDGE_SLOPE):
        return math.inf, math.inf
    if np.all(slopes[:_EDGE_RUN] < -EDGE_SLOPE):
        return math.inf, 0.0

    best = float(np.max(vals))
    arg = float(x[np.argmax(vals)])
    interior = [i for i in range(1, len(x) - 1)
                if vals[i] >= vals[i - 1] and vals[i] >= vals[i + 1] and np.isfinite(vals[i])]
    interior.sort(key=lambda i: -vals[i])

    def neg(xx):
        with np.errstate(all="ignore"):
            v = float(np.asarray(log_g(np.array([math.exp(xx)])), dtype=float)[0])
        return -v if not math.isnan(v) else math.inf

    for i in interior[:_MAX_POLISH]:
        if vals[i] < best - 1.0:
            break
        if not (vals[i] > vals[i - 1] and vals[i] > vals[i + 1]):
            continue  # plateau: the grid value already is the supremum
        res = minimize_scalar(neg, bracket=(x[i - 1], x[i], x[i + 1]), method="golden",
                              tol=1e-10)
        if -res.fun > best and x[i - 1] <= res.x <= x[i + 1]:
            best, arg = float(-res.fun), float(res.x)
    return best, float(math.exp(arg))


def sup_over_t(g: Callable, *, log: bool = False) -> float:
    """sup over 0 < t < inf of a positive g (``log=True``: g returns log values)."""
    if log:
        log_g = g
    else:
        def log_g(t):
            with np.errstate(divide="ignore"):
                return np.log(np.asarray(g(t), dtype=float))
    value, _ = log_sup_over_t(log_g)
    return _exp(value)


def _exp(v: float) -> float:
    if v == math.inf:
        return math.inf
    return math.exp(v) if v < 709.0 else math.inf


# --------------------------------------------------------------------------
# individual conditions; each returns log B (+inf when infinite)


def _any_infinite(datum: LineDatum) -> bool:
    return datum.U1.infinite or datum.V1(1).infinite or datum.V1(2).infinite


def _tail_kernel(datum: LineDatum, i: int, tag: str = "") -> CumulativeKernel:
    """int_t^inf U1^(r_i/q) V1i^(r_i/q') V~_i^(1-p_i') ds for i = 1, 2."""
    e = datum.exps
    r = e.r(i)
    if r is None or e.qc is None:
        raise ValueError(f"r{i} or q' undefined for {e}")

    def build():
        f = Composite([(datum.U1, r / e.q), (datum.V1(i), r / e.qc), (datum.lw.vi(i), 1.0)],
                      f"tail integrand {i}")
        return CumulativeKernel(f, "upper", datum.cfg, f"I{i}")

    return datum.cached(f"I{i}{tag}", build)


def log_B1(datum: LineDatum) -> float:
    e = datum.exps
    if _any_infinite(datum):
        return math.inf
    U1, V11, V12 = datum.U1, datum.V1(1), datum.V1(2)

    def log_g(t):
        return U1.log(t) / e.q + V11.log(t) / e.p1c + V12.log(t) / e.p2c

    return log_sup_over_t(log_g)[0]


def _log_B_mixed(datum: LineDatum, outer: int) -> float:
    """B2 (outer=1) or B3 (outer=2): sup V1o^(1/po') (int_t^inf ...)^(1/r_m)."""
    e = datum.exps
    inner = 2 if outer == 1 else 1
    if _any_infinite(datum):
        return math.inf
    I = _tail_kernel(datum, inner)
    if I.infinite:
        return math.inf
    V = datum.V1(outer)
    r = e.r(inner)

    def log_g(t):
        return V.log(t) / e.pc(outer) + I.log(t) / r

    return log_sup_over_t(log_g)[0]


def log_B2(datum: LineDatum) -> float:
    return _log_B_mixed(datum, 1)


def log_B3(datum: LineDatum) -> float:
    return _log_B_mixed(datum, 2)


def _log_k_integral(datum: LineDatum, factors, label: str) -> float:
    e = datum.exps
    f = Composite(factors, label)
    res = integrate(f.log, 0.0, math.inf, datum.cfg, f.hints, log=True)
    return res.unwrap_log() / e.k


def log_B4(datum: LineDatum) -> float:
    e = datum.exps
    if _any_infinite(datum):
        return math.inf
    k = e.k
    return _log_k_integral(datum, [(datum.U1, k / e.p1 + k / e.p2), (datum.V1(1), k / e.p1c),
                                   (datum.V1(2), k / e.p2c), (datum.lw.u_tilde, 1.0)], "B4")


def _log_B_outer(datum: LineDatum, tail: int, tail_power_r: int, outer: int) -> float:
    """(int_0^inf I_tail^(k/r_a) V1o^(k/r_tail') V~_o^(1-p_o') dt)^(1/k)."""
    e = datum.exps
    if _any_infinite(datum):
        return math.inf
    I = _tail_kernel(datum, tail)
    if I.infinite:
        return math.inf
    k = e.k
    r_tail = e.r(tail)
    r_conj = r_tail / (r_tail - 1.0)
    return _log_k_integral(datum, [(I, k / e.r(tail_power_r)), (datum.V1(outer), k / r_conj),
                                   (datum.lw.vi(outer), 1.0)], f"B{tail}")


def log_B5(datum: LineDatum) -> float:
    return _log_B_outer(datum, tail=2, tail_power_r=2, outer=1)


def log_B6(datum: LineDatum) -> float:
    """As displayed: the inner integral carries the power k/r2."""
    return _log_B_outer(datum, tail=1, tail_power_r=2, outer=2)


def log_B6_alt(datum: LineDatum) -> float:
    """Index-symmetric reading: the inner integral carries the power k/r1."""
    return _log_B_outer(datum, tail=1, tail_power_r=1, outer=2)


_LOG_EVALUATORS = {"B1": log_B1, "B2": log_B2, "B3": log_B3, "B4": log_B4, "B5": log_B5,
                   "B6": log_B6, "B6_alt": log_B6_alt}


def _public(name):
    fn = _LOG_EVALUATORS[name]

    def evaluator(datum: LineDatum) -> float:
        return _exp(fn(datum))

    evaluator.__name__ = f"eval_{name}"
    evaluator.__doc__ = f"{name} of the datum; +inf when infinite."
    return evaluator


eval_B1 = _public("B1")
eval_B2 = _public("B2")
eval_B3 = _public("B3")
eval_B4 = _public("B4")
eval_B5 = _public("B5")
eval_B6 = _public("B6")
eval_B6_alt = _public("B6_alt")


# --------------------------------------------------------------------------
# brackets and the report


def bracket_constant(case: CaseId, B: dict, exps: ExponentSystem) -> tuple[float, float] | None:
    """(C_low, C_high) for cases I-III; None for case IV, uncovered or infinite data.

    For a swapped case II, ``B`` and ``exps`` must already be in swapped order.
    """
    if case.name not in ("I", "II", "III"):
        return None
    needed = REQUIRED[case.name]
    vals = [B.get(n) for n in needed]
    if any(v is None or not math.isfinite(v) for v in vals):
        return None
    q = exps.q
    if case.name == "I":
        b1 = B["B1"]
        return b1, 8.0 * (1.0 + 4.0 ** q) ** (1.0 / q) * b1
    qc = exps.qc
    qq = q ** (1.0 / q)
    b1, b2 = B["B1"], B["B2"]
    r2, p2c = exps.r2, exps.p2c
    low2 = qq * (q * p2c / r2) ** (1.0 / qc) * b2
    if case.name == "II":
        return max(b1, low2), 8.0 * (b1 + qq * p2c ** (1.0 / qc) * b2)
    b3 = B["B3"]
    r1, p1c = exps.r1, exps.p1c
    low3 = qq * (q * p1c / r1) ** (1.0 / qc) * b3
    high = 8.0 * (8.0 * b3 + 4.0 * (p1c / r1) ** (1.0 / r1) * b1 + qq * p2c ** (1.0 / qc) * b2)
    return max(b1, low2, low3), high


def _encode(v):
    if v is None:
        return None
    if isinstance(v, float) and math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return v


def _decode(v):
    if v == "inf":
        return math.inf
    if v == "-inf":
        return -math.inf
    return v


@dataclass
class ConditionReport:
    """Evaluated conditions for one datum.

    ``B`` maps condition names to values (``math.inf`` when infinite, ``None``
    when evaluation failed).  ``B6`` is the condition as displayed and
    ``B6_alt`` its index-symmetric reading; case IV requires both.
    """

    case: CaseId
    B: dict = field(default_factory=dict)
    bracket: tuple[float, float] | None = None
    holds: bool = False
    diagnostics: list = field(default_factory=list)
    required: tuple = ()
    exps: ExponentSystem | None = None

    @property
    def c_low(self) -> float | None:
        return None if self.bracket is None else self.bracket[0]

    @property
    def c_high(self) -> float | None:
        return None if self.bracket is None else self.bracket[1]

    @property
    def undetermined(self) -> bool:
        return any(self.B.get(n, 0.0) is None for n in self.required)

    def to_dict(self) -> dict:
        out = {
            "case": self.case.label(),
            "swapped": self.case.swapped,
            "holds": self.holds,
            "c_low": _encode(self.c_low),
            "c_high": _encode(self.c_high),
            "required": list(self.required),
            "diagnostics": list(self.diagnostics),
        }
        if self.case.reason:
            out["reason"] = self.case.reason
        if self.exps is not None:
            out["exponents"] = self.exps.to_dict()
        for name in ("B1", "B2", "B3", "B4", "B5", "B6", "B6_alt"):
            out[name] = _encode(self.B.get(name))
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_dict(cls, d: dict) -> "ConditionReport":
        label = d["case"]
        name = {"CaseI": "I", "CaseII": "II", "CaseII_swap": "II", "CaseIII": "III",
                "CaseIV": "IV", "NotCovered": "NotCovered"}[label]
        case = CaseId(name, bool(d.get("swapped", False)), d.get("reason", ""))
        B = {n: _decode(d[n]) for n in ("B1", "B2", "B3", "B4", "B5", "B6", "B6_alt")
             if d.get(n) is not None}
        bracket = None
        if d.get("c_low") is not None:
            bracket = (_decode(d["c_low"]), _decode(d["c_high"]))
        exps = ExponentSystem(**d["exponents"]) if "exponents" in d else None
        return cls(case, B, bracket, bool(d["holds"]), list(d.get("diagnostics", [])),
                   tuple(d.get("required", ())), exps)

    @classmethod
    def from_json(cls, text: str) -> "ConditionReport":
        return cls.from_dict(json.loads(text))


def evaluate(datum: LineDatum, names=None) -> ConditionReport:
    """Dispatch the case of ``datum`` and evaluate its required conditions."""
    case = dispatch_case(datum.exps)
    if not case.covered:
        return ConditionReport(case, diagnostics=[case.reason], exps=datum.exps)
    work = datum.swapped() if case.swapped else datum
    required = REQUIRED[case.name]
    names = required if names is None else tuple(names)
    B: dict = {}
    diagnostics: list = []
    if case.name == "II":
        diagnostics.append("case II bracket read as max{...} <= C <= 8(...)")
    if case.swapped:
        diagnostics.append("case II with p2 <= q < p1: evaluated with indices 1 and 2 exchanged")
    for name in names:
        try:
            B[name] = _exp(_LOG_EVALUATORS[name](work))
        except UndeterminedError as exc:
            B[name] = None
            diagnostics.append(f"{name}: {exc.diagnostic}")
    holds = all(B.get(n) is not None and math.isfinite(B[n]) for n in required)
    if case.name == "IV" and B.get("B6") is not None and B.get("B6_alt") is not None:
        if math.isfinite(B["B6"]) != math.isfinite(B["B6_alt"]):
            diagnostics.append("B6 readings disagree on finiteness (inner power k/r2 vs k/r1)")
    bracket = bracket_constant(case, B, work.exps) if holds else None
    return ConditionReport(case, B, bracket, holds, diagnostics, required, datum.exps)


def eval_report(geo: RadialGeometry, weights: WeightTriple, exps: ExponentSystem,
                cfg: QuadConfig | None = None) -> ConditionReport:
    """Full pipeline from space data: line weights, kernels, case, conditions, bracket."""
    case = dispatch_case(exps)
    if not case.covered:
        return ConditionReport(case, diagnostics=[case.reason], exps=exps)
    return evaluate(LineDatum.from_space(geo, weights, exps, cfg))


def line_report(lw: LineWeights, cfg: QuadConfig | None = None) -> ConditionReport:
    return evaluate(LineDatum(lw, cfg))
