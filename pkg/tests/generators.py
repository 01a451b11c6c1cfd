"""Seeded random power data for cross-validation and acceptance tests."""

import math

import numpy as np

from bihardy.classify import TOL, PowerDatum, classify
from bihardy.conditions import evaluate
from bihardy.exponents import ExponentSystem
from bihardy.geometry import RadialGeometry

MARGIN = 0.05


def _exps_case_I(rng):
    p1, p2 = rng.uniform(1.3, 4.0, 2)
    return ExponentSystem(p1, p2, rng.uniform(max(p1, p2), 5.0))


def _exps_case_II(rng):
    lo, hi = np.sort(rng.uniform(1.3, 5.0, 2))
    if hi - lo < 0.3:
        hi = lo + 0.3
    q = rng.uniform(lo, hi - 0.1)
    return ExponentSystem(lo, hi, q) if rng.random() < 0.5 else ExponentSystem(hi, lo, q)


def _betas_for(rng, dim, exps, b_range):
    b = rng.uniform(*b_range, 2)
    # b_i = beta_i (1 - p_i') + dim
    return [(b[i] - dim) / (1.0 - exps.pc(i + 1)) for i in range(2)]


def random_homogeneous(rng, case=None):
    Q = rng.uniform(2.0, 6.0)
    geo = RadialGeometry.homogeneous(Q, rng.uniform(0.5, 3.0))
    case = case or ("I" if rng.random() < 0.5 else "II")
    exps = _exps_case_I(rng) if case == "I" else _exps_case_II(rng)
    beta1, beta2 = _betas_for(rng, Q, exps, (-1.0, 3.0))
    d = PowerDatum(geo, 0.0, beta1, beta2, exps)
    if rng.random() < 0.6:
        a = -exps.q * (d.b(1) / exps.p1c + d.b(2) / exps.p2c)
    else:
        a = rng.uniform(-4.0, 1.0)
    return PowerDatum(geo, a - Q, beta1, beta2, exps)


def random_sinh(rng, geo):
    exps = _exps_case_I(rng)
    n = geo.dim
    beta1, beta2 = _betas_for(rng, n, exps, (-0.5, 3.0))
    a = rng.uniform(-2.5, 1.5)
    return PowerDatum(geo, a - n, beta1, beta2, exps)


def non_borderline(verdict) -> bool:
    for c in verdict.conditions:
        s = abs(c.slack)
        if c.relation == "==":
            if not (s < TOL or s > MARGIN):
                return False
        elif s < MARGIN:
            return False
    return True


def numeric_quantities(datum: PowerDatum) -> dict:
    rep = evaluate(datum.to_line_datum())
    out = {"D1": rep.B.get("B1")}
    if rep.case.name == "II":
        out["D2"] = rep.B.get("B2")
    return out


def agrees(verdict, numbers: dict) -> bool:
    """Holds-type verdicts need finite quantities; Fails needs its named quantity infinite."""
    claim = verdict.finite_claim
    if claim is None:
        return True
    if claim:
        return all(v is not None and math.isfinite(v) for v in numbers.values())
    return any(numbers.get(q) == math.inf for q in verdict.failing_quantities())


def sample_cross_validation(rng, make, count):
    """(datum, verdict) pairs with a definite, non-borderline verdict."""
    out = []
    while len(out) < count:
        d = make(rng)
        v = classify(d)
        if v.finite_claim is None or not non_borderline(v):
            continue
        out.append((d, v))
    return out
