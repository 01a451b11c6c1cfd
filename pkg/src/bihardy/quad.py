"""Adaptive quadrature on (0, T), (T, inf) and (0, inf) with divergence detection.

Everything is done in the log domain: integrands are handed over (or
converted) as ``log f`` and results come back as ``log(integral)``, which
keeps sinh-power weights usable far beyond the range of a double.

The engine works in the variable ``x = log t``.  Finite pieces use the
tanh-sinh rule; a piece touching 0 or infinity is mapped by
``t = T * exp(-/+ X)`` with ``X = exp(pi/2 sinh(tau))`` (the exp-sinh rule),
so power-law ends become exponential decays in ``X``.  The step in ``tau`` is
halved until two consecutive levels agree; the difference is reported as the
error estimate.  The true error is, in practice, far below that estimate;
:data:`COVERAGE_FACTOR` is the documented safety factor.

Before any sampling, an endpoint at 0 or infinity is classified, either from
declared :class:`~bihardy.asymptotics.Hints` or by fitting log-log slopes on
a geometric sample toward the endpoint.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .asymptotics import Hints, converges_at_inf, converges_at_zero

COVERAGE_FACTOR = 10.0
GUARD_BAND = 0.02

_HALF_PI = 0.5 * math.pi
# |log t| stays below this at every node, so t itself never overflows
_X_CAP = 690.0
_TANH_SINH_TAU = 5.0
_EXP_SINH_TAU_LO = -5.0
_EXP_SINH_TAU_HI = 4.5
_MIN_LEVEL = 3
# rows per vectorized batch, bounds the node matrix size
_ROW_BATCH = 256


class UndeterminedError(ArithmeticError):
    """Raised when an integral or kernel cannot be classified or evaluated."""

    def __init__(self, diagnostic: str, endpoint: str | None = None):
        super().__init__(diagnostic)
        self.diagnostic = diagnostic
        self.endpoint = endpoint


@dataclass(frozen=True)
class QuadConfig:
    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_depth: int = 10
    sniff_points: int = 12

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("quadrature tolerances must be positive")
        if self.max_depth < _MIN_LEVEL or self.sniff_points < 6:
            raise ValueError("max_depth must be >= 3 and sniff_points >= 6")


DEFAULT_CONFIG = QuadConfig()


@dataclass(frozen=True)
class QuadResult:
    """Outcome of one integral: a value, a divergence, or a diagnostic.

    ``outcome`` is one of ``"value"``, ``"divergent"``, ``"undetermined"``.
    For values, ``log_value`` is authoritative; ``value`` may overflow to inf.
    """

    outcome: str
    log_value: float = -math.inf
    error: float = 0.0
    endpoint: str | None = None
    diagnostic: str = ""

    @property
    def value(self) -> float:
        if self.outcome == "divergent":
            return math.inf
        if self.outcome == "undetermined":
            return math.nan
        return math.exp(self.log_value) if self.log_value < 709.0 else math.inf

    @property
    def is_value(self) -> bool:
        return self.outcome == "value"

    @property
    def is_divergent(self) -> bool:
        return self.outcome == "divergent"

    def unwrap_log(self) -> float:
        """log of the integral, +inf when divergent; raises when undetermined."""
        if self.outcome == "undetermined":
            raise UndeterminedError(self.diagnostic, self.endpoint)
        return math.inf if self.outcome == "divergent" else self.log_value


def as_log_integrand(f: Callable, log: bool = False) -> Callable[[np.ndarray], np.ndarray]:
    """Wrap ``f`` so that it maps an array of t to an array of log f(t)."""
    if log:
        return lambda t: np.asarray(f(t), dtype=float)

    def log_f(t):
        with np.errstate(divide="ignore", invalid="ignore"):
            try:
                vals = np.asarray(f(t), dtype=float)
                if vals.shape != np.shape(t):
                    vals = np.broadcast_to(vals, np.shape(t)).astype(float)
            except (TypeError, ValueError):
                vals = np.vectorize(lambda s: float(f(float(s))))(t)
            out = np.log(vals)
            out[vals < 0] = np.nan
            # nan at extreme arguments comes from overflowing user arithmetic
            # (inf * 0); such nodes carry no mass once the end is convergent
            t_arr = np.broadcast_to(np.asarray(t, dtype=float), out.shape)
            extreme = np.isnan(vals) & ((t_arr > 1e100) | (t_arr < 1e-100))
            out[extreme] = -np.inf
            return out

    return log_f


# --------------------------------------------------------------------------
# double-exponential rules, vectorized over independent rows


def _finite_rows(log_g, xa, xb, rel_tol, abs_tol, max_depth):
    """log of int_{xa}^{xb} exp(log_g(x)) dx for each row (tanh-sinh)."""
    xa = np.asarray(xa, float)
    xb = np.asarray(xb, float)
    width = xb - xa
    log_width = np.log(np.where(width > 0, width, 1.0))

    def level_sum(tau, rows):
        tau = tau[None, :]
        y = _HALF_PI * np.sinh(tau)
        log_s = -np.logaddexp(0.0, -2.0 * y)
        log_1ms = -np.logaddexp(0.0, 2.0 * y)
        s = np.exp(log_s)
        oms = np.exp(log_1ms)
        a = xa[rows, None]
        b = xb[rows, None]
        x = np.where(tau < 0, a + (b - a) * s, b - (b - a) * oms)
        lw = log_width[rows, None] + np.log(math.pi * np.cosh(tau)) + log_s + log_1ms
        with np.errstate(invalid="ignore", over="ignore"):
            terms = log_g(x) + lw
        return _logsumexp_rows(terms)

    h = 0.5
    tau = np.arange(-_TANH_SINH_TAU, _TANH_SINH_TAU + 1e-12, h)
    return _refine(level_sum, tau, h, len(xa), rel_tol, abs_tol, max_depth,
                   lambda tau_prev, h_new: tau_prev + h_new, zero_mask=width <= 0)


def _semi_rows(log_g, x0, direction, rel_tol, abs_tol, max_depth):
    """log of int_0^inf exp(log_g(x0 + direction*X)) dX for each row (exp-sinh).

    ``direction=+1`` integrates toward t = inf, ``-1`` toward t = 0.  Beyond
    ``|x| = _X_CAP`` the integrand is continued by its local exponential
    decay in ``X`` (exact for power laws in t), so slowly decaying tails are
    not truncated.
    """
    x0 = np.asarray(x0, float)
    x_max = np.maximum(_X_CAP - direction * x0, 5.0)
    with np.errstate(invalid="ignore", over="ignore"):
        le = log_g((x0 + direction * x_max)[:, None])[:, 0]
        le1 = log_g((x0 + direction * (x_max - 1.0))[:, None])[:, 0]
    with np.errstate(invalid="ignore"):
        kappa = le1 - le
    # no decay at the cap: flagged below unless the integrand is already negligible
    kappa_ok = kappa > 0
    kappa = np.where(kappa_ok, kappa, np.inf)

    def level_sum(tau, rows):
        tau = tau[None, :]
        log_X = _HALF_PI * np.sinh(tau)
        X = np.exp(log_X)
        xm = x_max[rows, None]
        inside = X <= xm
        x = x0[rows, None] + direction * np.minimum(X, xm)
        lj = log_X + np.log(_HALF_PI * np.cosh(tau))
        with np.errstate(invalid="ignore", over="ignore"):
            lg = log_g(x)
            ext = le[rows, None] - kappa[rows, None] * (X - xm)
            terms = np.where(inside, lg, ext) + lj
        return _logsumexp_rows(terms)

    h = 0.5
    tau = np.arange(_EXP_SINH_TAU_LO, _EXP_SINH_TAU_HI + 1e-12, h)
    log_s, err, ok = _refine(level_sum, tau, h, len(x0), rel_tol, abs_tol, max_depth,
                             lambda prev, h_new: prev + h_new)
    stuck = np.isfinite(le) & ~kappa_ok & (le > log_s + math.log(rel_tol))
    return log_s, err, ok & ~stuck


def _logsumexp_rows(terms):
    terms = np.where(np.isnan(terms), np.inf, terms)  # nan poisons the row
    m = np.max(terms, axis=1)
    finite_m = np.where(np.isfinite(m), m, 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.log(np.sum(np.exp(terms - finite_m[:, None]), axis=1)) + finite_m
    s = np.where(m == -np.inf, -np.inf, s)
    s = np.where(m == np.inf, np.inf, s)
    return s


def _refine(level_sum, nodes0, h0, m, rel_tol, abs_tol, max_depth, odd_nodes, zero_mask=None):
    """Trapezoid-in-tau refinement loop shared by both rules.

    Returns (log sums, relative error estimates, converged mask).
    """
    rows = np.arange(m)
    log_s = level_sum(nodes0, rows) + math.log(h0)
    err = np.full(m, np.inf)
    ok = np.zeros(m, dtype=bool)
    if zero_mask is not None:
        log_s[zero_mask] = -np.inf
        err[zero_mask] = 0.0
        ok[zero_mask] = True
    active = ~ok
    h = h0
    # odd-node generator: new nodes lie midway between the previous ones
    base = nodes0
    for level in range(1, max_depth + 1):
        if not np.any(active):
            break
        h *= 0.5
        new_nodes = odd_nodes(base, h)
        rows = np.nonzero(active)[0]
        new = level_sum(new_nodes, rows) + math.log(h)
        old = log_s[rows]
        upd = np.logaddexp(old - math.log(2.0), new)
        with np.errstate(invalid="ignore"):
            rel = np.abs(np.expm1(old - upd))
        rel = np.where((old == -np.inf) & (upd == -np.inf), 0.0, rel)
        log_s[rows] = upd
        err[rows] = rel
        val = np.exp(np.minimum(upd, 700.0))
        done = (rel <= rel_tol) | (rel * val <= abs_tol)
        done &= level >= _MIN_LEVEL
        done &= np.isfinite(rel)
        ok[rows[done]] = True
        active[rows[done]] = False
        base = np.sort(np.concatenate([base, new_nodes]))
    return log_s, err, ok


# --------------------------------------------------------------------------
# endpoint classification


def sniff_endpoint(log_f, endpoint: str, ref: float, cfg: QuadConfig = DEFAULT_CONFIG):
    """Classify integrability of ``exp(log_f)`` at ``endpoint`` by slope fitting.

    Samples a geometric sequence of ``cfg.sniff_points`` points moving away
    from ``ref`` toward the endpoint, and looks at the last four log-log
    slopes.  Exponential decay or growth shows up as slopes running off to
    -inf or +inf, which fall on the right side of the threshold as well.

    Returns ``("convergent" | "divergent" | "undetermined", slopes)``.
    """
    n = cfg.sniff_points
    decades = 2.0 + np.arange(n)
    if endpoint == "zero":
        t = ref * 10.0 ** (-decades)
    else:
        t = ref * 10.0 ** decades
    with np.errstate(all="ignore"):
        lf = np.asarray(log_f(t), dtype=float)
        lt = np.log(t)
        slopes = np.diff(lf) / np.diff(lt)
    if endpoint == "zero":
        # f vanishing faster than any power toward 0 means a huge positive slope
        slopes = np.where(np.isnan(slopes) & (lf[1:] == -np.inf), np.inf, slopes)
    else:
        slopes = np.where(np.isnan(slopes) & (lf[1:] == -np.inf), -np.inf, slopes)
    tail = slopes[-4:]
    if np.any(np.isnan(tail)):
        return "undetermined", slopes
    lo, hi = -1.0 - GUARD_BAND, -1.0 + GUARD_BAND
    # a slope pinned at -1 across every sampled scale is the log-divergent 1/t
    if np.all(np.abs(slopes + 1.0) < 1e-6):
        return "divergent", slopes
    if endpoint == "zero":
        if np.all(tail >= hi):
            return "convergent", slopes
        if np.all(tail <= lo):
            return "divergent", slopes
    else:
        if np.all(tail <= lo):
            return "convergent", slopes
        if np.all(tail >= hi):
            return "divergent", slopes
    return "undetermined", slopes


def classify_endpoint(log_f, endpoint: str, ref: float, hints: Hints | None,
                      cfg: QuadConfig = DEFAULT_CONFIG) -> tuple[str, str]:
    """Return (verdict, diagnostic) for one endpoint, hints first."""
    if hints is not None:
        if endpoint == "zero" and hints.zero is not None:
            ok = converges_at_zero(hints.zero)
            return ("convergent" if ok else "divergent"), f"declared exponent {hints.zero:g} at 0"
        if endpoint == "infinity" and hints.inf is not None:
            ok = converges_at_inf(hints.inf)
            return ("convergent" if ok else "divergent"), f"declared growth {hints.inf!r} at infinity"
    verdict, slopes = sniff_endpoint(log_f, endpoint, ref, cfg)
    tail = ", ".join(f"{s:.4g}" for s in slopes[-4:])
    if verdict == "undetermined":
        diag = f"slope sniffing at {endpoint} is inconclusive (last slopes: {tail})"
    else:
        diag = f"sniffed slopes at {endpoint}: {tail}"
    return verdict, diag


# --------------------------------------------------------------------------
# public integration entry points


def integrate(f: Callable, lo: float, hi: float, cfg: QuadConfig | None = None,
              hints: Hints | None = None, *, log: bool = False,
              breakpoints: Sequence[float] = ()) -> QuadResult:
    """Integrate a nonnegative ``f`` over ``(lo, hi)``; ``hi`` may be ``inf``.

    ``f`` must accept numpy arrays.  With ``log=True`` it returns log f.
    ``breakpoints`` are interior points where f may be non-smooth.
    """
    cfg = cfg or DEFAULT_CONFIG
    lo = float(lo)
    hi = float(hi)
    if not lo >= 0 or not hi > lo:
        raise ValueError(f"need 0 <= lo < hi, got ({lo}, {hi})")
    log_f = as_log_integrand(f, log)

    cuts = sorted({float(b) for b in breakpoints if lo < b < hi})
    if lo == 0.0 and math.isinf(hi) and not cuts:
        cuts = [1.0]
    edges = [lo, *cuts, hi]

    if lo == 0.0:
        verdict, diag = classify_endpoint(log_f, "zero", edges[1] if math.isfinite(edges[1]) else 1.0,
                                          hints, cfg)
        if verdict != "convergent":
            return _non_value(verdict, "zero", diag)
    if math.isinf(hi):
        verdict, diag = classify_endpoint(log_f, "infinity", max(edges[-2], 1.0), hints, cfg)
        if verdict != "convergent":
            return _non_value(verdict, "infinity", diag)

    def log_g(x):
        return log_f(np.exp(x)) + x

    parts = []
    errs = []
    for a, b in zip(edges[:-1], edges[1:]):
        if a == 0.0:
            ls, er, ok = _semi_rows(log_g, np.array([math.log(b)]), -1, cfg.rel_tol, cfg.abs_tol,
                                    cfg.max_depth)
        elif math.isinf(b):
            ls, er, ok = _semi_rows(log_g, np.array([math.log(a)]), +1, cfg.rel_tol, cfg.abs_tol,
                                    cfg.max_depth)
        else:
            ls, er, ok = _finite_rows(log_g, np.array([math.log(a)]), np.array([math.log(b)]),
                                      cfg.rel_tol, cfg.abs_tol, cfg.max_depth)
        if not np.isfinite(ls[0]) and ls[0] != -np.inf:
            return QuadResult("undetermined", diagnostic=f"integrand not finite on ({a:g}, {b:g})")
        parts.append(ls[0])
        errs.append(er[0] if np.isfinite(er[0]) else 1.0)

    parts = np.array(parts)
    total = float(np.logaddexp.reduce(parts)) if len(parts) else -math.inf
    abs_err = float(sum(np.exp(np.minimum(p, 700.0)) * e for p, e in zip(parts, errs)))
    return QuadResult("value", log_value=total, error=abs_err)


def _non_value(verdict: str, endpoint: str, diag: str) -> QuadResult:
    if verdict == "divergent":
        return QuadResult("divergent", log_value=math.inf, endpoint=endpoint, diagnostic=diag)
    return QuadResult("undetermined", endpoint=endpoint, diagnostic=diag)


def log_integrate_rows(log_f, lo, hi, cfg: QuadConfig | None = None, rel_tol: float | None = None):
    """Vectorized log-integrals of ``exp(log_f)`` over many intervals at once.

    ``lo``/``hi`` are arrays of equal length; every row must either be
    finite with ``lo > 0``, or be ``(0, hi)``, or be ``(lo, inf)``.  Endpoint
    convergence is the caller's responsibility.  Returns the array of logs.
    """
    cfg = cfg or DEFAULT_CONFIG
    rtol = cfg.rel_tol if rel_tol is None else rel_tol
    lo = np.atleast_1d(np.asarray(lo, float))
    hi = np.atleast_1d(np.asarray(hi, float))
    out = np.full(lo.shape, -np.inf)

    def log_g(x):
        return log_f(np.exp(x)) + x

    if lo.size > _ROW_BATCH:
        for start in range(0, lo.size, _ROW_BATCH):
            sl = slice(start, start + _ROW_BATCH)
            out[sl] = log_integrate_rows(log_f, lo[sl], hi[sl], cfg, rel_tol)
        return out

    head = lo == 0.0
    tail = np.isinf(hi) & ~head
    mid = ~(head | tail)
    if np.any(mid):
        ls, _, _ = _finite_rows(log_g, np.log(lo[mid]), np.log(hi[mid]), rtol, 0.0, cfg.max_depth)
        out[mid] = ls
    if np.any(head):
        ls, _, _ = _semi_rows(log_g, np.log(hi[head]), -1, rtol, 0.0, cfg.max_depth)
        out[head] = ls
    if np.any(tail):
        ls, _, _ = _semi_rows(log_g, np.log(lo[tail]), +1, rtol, 0.0, cfg.max_depth)
        out[tail] = ls
    return out


def integrate_weighted_inner(factors, weight, lo: float, hi: float,
                             cfg: QuadConfig | None = None, hints: Hints | None = None) -> QuadResult:
    """Integrate a product of kernel powers times a line weight.

    ``factors`` is a sequence of ``(kernel, exponent)`` pairs, where each
    kernel exposes ``log(t)`` and optional ``hints``; ``weight`` is either
    ``None`` or a callable returning the weight values.  The integrand is
    ``prod kernel(s)**exponent * weight(s)``.  A kernel that is identically
    +inf makes the result divergent.
    """
    for kern, expo in factors:
        if getattr(kern, "infinite", False) and expo > 0:
            return QuadResult("divergent", log_value=math.inf, endpoint=None,
                              diagnostic="kernel is identically +inf")
    log_w = as_log_integrand(weight) if weight is not None else (lambda t: np.zeros_like(t))

    def log_h(t):
        acc = log_w(t)
        for kern, expo in factors:
            acc = acc + expo * kern.log(t)
        return acc

    if hints is None:
        hints = getattr(weight, "hints", None)
        parts = [hints] + [getattr(k, "hints", None) for k, _ in factors]
        if all(p is not None for p in parts) and weight is not None:
            hints = parts[0]
            for (kern, expo), hk in zip(factors, parts[1:]):
                hints = hints + hk.scale(expo)
        else:
            hints = None
    return integrate(log_h, lo, hi, cfg, hints, log=True)
