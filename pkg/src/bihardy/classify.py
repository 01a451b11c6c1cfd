"""Closed-form verdicts for power-type weights in the three geometries.

With ``a = alpha + dim`` and ``b_i = beta_i (1 - p_i') + dim`` the radial
integrals behind D1 and D2 are pure powers (homogeneous) or sinh-powers
(hyperbolic, Cartan-Hadamard), so finiteness reduces to sign and balance
conditions on these exponents.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .exponents import CaseId, ExponentSystem, dispatch_case
from .geometry import GeometryKind, RadialGeometry
from .weights import LineDatum, Power, SinhPower, WeightTriple

TOL = 1e-9

HOLDS = "Holds"
FAILS = "Fails"
HOLDS_SUFFICIENT = "HoldsSufficient"
UNKNOWN = "Unknown"
NOT_COVERED = "NotCovered"
VERDICT_KINDS = (HOLDS, FAILS, HOLDS_SUFFICIENT, UNKNOWN, NOT_COVERED)


@dataclass(frozen=True)
class PowerDatum:
    """Power weights ``u = |x|^alpha``, ``v_i = |x|^beta_i`` (sinh-powers off the flat case)."""

    geometry: RadialGeometry
    alpha: float
    beta1: float
    beta2: float
    exps: ExponentSystem

    @property
    def dim(self) -> float:
        return self.geometry.dim

    @property
    def flat(self) -> bool:
        return self.geometry.scale == 0.0

    def beta(self, i: int) -> float:
        return self.beta1 if i == 1 else self.beta2

    @property
    def a(self) -> float:
        return self.alpha + self.dim

    def b(self, i: int) -> float:
        return self.beta(i) * (1.0 - self.exps.pc(i)) + self.dim

    @property
    def balance(self) -> float:
        e = self.exps
        return self.a / e.q + self.b(1) / e.p1c + self.b(2) / e.p2c

    def to_weights(self) -> WeightTriple:
        if self.flat:
            return WeightTriple(Power(self.alpha), Power(self.beta1), Power(self.beta2))
        s = self.geometry.scale
        return WeightTriple(SinhPower(self.alpha, s), SinhPower(self.beta1, s),
                            SinhPower(self.beta2, s))

    def to_line_datum(self, cfg=None) -> LineDatum:
        return LineDatum.from_space(self.geometry, self.to_weights(), self.exps, cfg)

    def swapped(self) -> "PowerDatum":
        return PowerDatum(self.geometry, self.alpha, self.beta2, self.beta1, self.exps.swapped())

    def with_geometry(self, geo: RadialGeometry) -> "PowerDatum":
        return PowerDatum(geo, self.alpha, self.beta1, self.beta2, self.exps)

    def to_dict(self) -> dict:
        return {"geometry": self.geometry.to_dict(), "alpha": self.alpha, "beta1": self.beta1,
                "beta2": self.beta2, "exponents": self.exps.to_dict()}


@dataclass(frozen=True)
class Condition:
    """A named inequality ``slack > 0`` (strict) or ``slack >= 0``, or ``slack == 0``.

    ``status`` is ``"ok"``, ``"violated"`` or ``"borderline"``; ``quantity``
    names the integral (``"D1"`` or ``"D2"``) that becomes infinite on failure.
    """

    name: str
    slack: float
    relation: str
    quantity: str = "D1"

    @property
    def status(self) -> str:
        s = self.slack
        if self.relation == "==":
            return "ok" if abs(s) < TOL else "violated"
        if abs(s) <= TOL:
            return "ok" if self.relation == ">=" else "borderline"
        return "ok" if s > 0 else "violated"

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    def to_dict(self) -> dict:
        return {"name": self.name, "relation": self.relation, "slack": self.slack,
                "status": self.status, "quantity": self.quantity}


@dataclass(frozen=True)
class Verdict:
    kind: str
    reason: str = ""
    conditions: tuple[Condition, ...] = ()
    case: str = ""
    violated: tuple[str, ...] = ()
    notes: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if self.kind not in VERDICT_KINDS:
            raise ValueError(f"unknown verdict kind {self.kind!r}")
        if self.kind == FAILS and not self.violated:
            raise ValueError("a failing verdict must name a violated condition")

    @property
    def finite_claim(self) -> bool | None:
        """True if the verdict asserts finiteness, False if it asserts divergence."""
        if self.kind in (HOLDS, HOLDS_SUFFICIENT):
            return True
        if self.kind == FAILS:
            return False
        return None

    def failing_quantities(self) -> tuple[str, ...]:
        names = set(self.violated)
        return tuple(sorted({c.quantity for c in self.conditions if c.name in names}))

    def to_dict(self) -> dict:
        return {"kind": self.kind, "reason": self.reason, "case": self.case,
                "violated": list(self.violated), "notes": list(self.notes),
                "conditions": [c.to_dict() for c in self.conditions]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_dict(cls, d: dict) -> "Verdict":
        conds = tuple(Condition(c["name"], c["slack"], c["relation"], c["quantity"])
                      for c in d["conditions"])
        return cls(d["kind"], d["reason"], conds, d["case"], tuple(d["violated"]),
                   tuple(d["notes"]))

    @classmethod
    def from_json(cls, text: str) -> "Verdict":
        return cls.from_dict(json.loads(text))


def _decide(conds: list[Condition], case: CaseId, success: str, notes=()) -> Verdict:
    violated = tuple(c.name for c in conds if c.status == "violated")
    border = tuple(c.name for c in conds if c.status == "borderline")
    if violated:
        return Verdict(FAILS, "violated: " + ", ".join(violated), tuple(conds), case.label(),
                       violated, tuple(notes))
    if border:
        return Verdict(UNKNOWN, "borderline: " + ", ".join(border), tuple(conds), case.label(),
                       (), tuple(notes))
    return Verdict(success, "all conditions hold", tuple(conds), case.label(), (), tuple(notes))


def _not_covered(case: CaseId, why: str) -> Verdict:
    return Verdict(NOT_COVERED, why, (), case.label())


def _require_flat(datum: PowerDatum):
    if not datum.flat:
        raise ValueError("classify_homogeneous needs a flat (power-law) geometry")


def classify_homogeneous(datum: PowerDatum) -> Verdict:
    """Exact verdict for cases I and II; NotCovered otherwise."""
    _require_flat(datum)
    case = dispatch_case(datum.exps)
    if case.name not in ("I", "II"):
        why = case.reason or f"{case.label()} has no closed-form power criterion"
        return _not_covered(case, why)
    notes = ()
    d = datum
    if case.swapped:
        d = datum.swapped()
        notes = ("indices swapped so that p1 <= q < p2",)
    e = d.exps
    a, b1, b2 = d.a, d.b(1), d.b(2)
    conds = [
        Condition("alpha+Q<0", -a, ">"),
        Condition("b1>0", b1, ">"),
        Condition("b2>0", b2, ">"),
        Condition("balance=0", d.balance, "=="),
    ]
    if case.name == "II":
        r2 = e.r2
        expr = a * r2 / e.q + b2 * r2 / e.qc + b2
        conds.append(Condition("r2_inequality", -expr, ">", quantity="D2"))
    return _decide(conds, case, HOLDS, notes)


def large_radius_exponent(datum: PowerDatum) -> float:
    """Growth rate of the D1 supremand as r -> inf for sinh-power data."""
    e = datum.exps
    return (datum.a - 1.0) / e.q + sum(max(datum.b(i) - 1.0, 0.0) / e.pc(i) for i in (1, 2))


def classify_hyperbolic(datum: PowerDatum) -> Verdict:
    """Three-valued verdict in case I for sinh-power weights."""
    case = dispatch_case(datum.exps)
    if case.name != "I":
        return _not_covered(case, case.reason or f"{case.label()} is not treated for sinh weights")
    e = datum.exps
    a, b1, b2 = datum.a, datum.b(1), datum.b(2)
    S = a / e.q + b1 / e.p1c + b2 / e.p2c
    bound = 1.0 / e.q + 1.0 / e.p1c + 1.0 / e.p2c
    necessary = [
        Condition("b1>0", b1, ">"),
        Condition("b2>0", b2, ">"),
        Condition("alpha+n-1<0", 1.0 - a, ">"),
    ]
    verdict = _decide(necessary, case, HOLDS_SUFFICIENT)
    if verdict.kind != HOLDS_SUFFICIENT:
        return verdict
    upper = Condition("sum<=bound", bound - S, ">=")
    in_a = [Condition("alpha+n>=0", a, ">="), upper]
    in_b = [Condition("alpha+n<0", -a, ">"), Condition("sum>=0", S, ">="), upper]
    a_ok = all(c.ok for c in in_a)
    b_ok = all(c.ok for c in in_b)
    conds = necessary + in_a + in_b[:2]
    if not (a_ok or b_ok):
        border = [c.name for c in in_a + in_b if c.status == "borderline"]
        why = "borderline: " + ", ".join(border) if border else "outside both sufficient regions"
        return Verdict(UNKNOWN, why, tuple(conds), case.label())
    # both regions allow b_i < 1, where the ball integral of v_i^(1-p_i') saturates
    tail = Condition("large_radius_exponent<=0", -large_radius_exponent(datum), ">=")
    conds.append(tail)
    which = "A" if a_ok else "B"
    if tail.status == "violated":
        return Verdict(FAILS, "violated: " + tail.name, tuple(conds), case.label(), (tail.name,),
                       (f"region ({which}) holds but D1 grows at large radius",))
    return Verdict(HOLDS_SUFFICIENT, f"sufficient region ({which})", tuple(conds), case.label())


def classify_cartan_hadamard(datum: PowerDatum) -> Verdict:
    """b = 0 delegates to the homogeneous rule with Q = n; b > 0 to the hyperbolic rule."""
    geo = datum.geometry
    if geo.kind is not GeometryKind.CARTAN_HADAMARD:
        raise ValueError("classify_cartan_hadamard needs a CartanHadamardConst geometry")
    if geo.curvature_b == 0.0:
        return classify_homogeneous(datum)
    return classify_hyperbolic(datum)


def classify(datum: PowerDatum) -> Verdict:
    kind = datum.geometry.kind
    if kind is GeometryKind.HOMOGENEOUS:
        return classify_homogeneous(datum)
    if kind is GeometryKind.HYPERBOLIC:
        return classify_hyperbolic(datum)
    return classify_cartan_hadamard(datum)


# --------------------------------------------------------------------------
# closed-form space quantities for flat power data


def space_D1(datum: PowerDatum) -> float:
    """sup_t (int_{|x|>t} u)^(1/q) prod_i (int_{|x|<t} v_i^(1-p_i'))^(1/p_i')."""
    _require_flat(datum)
    e = datum.exps
    a, b1, b2 = datum.a, datum.b(1), datum.b(2)
    if not (a < 0 and b1 > 0 and b2 > 0) or abs(datum.balance) >= TOL:
        return math.inf
    sigma = datum.geometry.sphere_area
    log_val = ((1.0 / e.q + 1.0 / e.p1c + 1.0 / e.p2c) * math.log(sigma)
               - math.log(-a) / e.q - math.log(b1) / e.p1c - math.log(b2) / e.p2c)
    return math.exp(log_val)


def space_D2(datum: PowerDatum) -> float:
    """sup_t (int_{|x|<t} v_1^(1-p_1'))^(1/p_1') times the r2-tail integral, case II."""
    _require_flat(datum)
    e = datum.exps
    r2, qc = e.r2, e.qc
    if r2 is None or qc is None:
        raise ValueError("D2 needs q < p2 and q > 1")
    a, b1, b2 = datum.a, datum.b(1), datum.b(2)
    if not (a < 0 and b1 > 0 and b2 > 0) or abs(datum.balance) >= TOL:
        return math.inf
    E = a * r2 / e.q + b2 * r2 / qc + b2
    if not E < 0:
        return math.inf
    sigma = datum.geometry.sphere_area
    log_val = ((1.0 / e.p1c + 1.0 / e.q + 1.0 / qc + 1.0 / r2) * math.log(sigma)
               - math.log(-a) / e.q - math.log(b2) / qc - math.log(b1) / e.p1c
               - math.log(-E) / r2)
    return math.exp(log_val)


__all__ = [
    "PowerDatum", "Condition", "Verdict", "classify", "classify_homogeneous",
    "classify_hyperbolic", "classify_cartan_hadamard", "space_D1", "space_D2",
    "large_radius_exponent", "HOLDS", "FAILS", "HOLDS_SUFFICIENT", "UNKNOWN", "NOT_COVERED",
    "TOL",
]
