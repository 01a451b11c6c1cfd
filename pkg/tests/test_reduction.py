import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bihardy.exponents import ExponentSystem
from bihardy.geometry import RadialGeometry
from bihardy.reduction import (ZERO, CustomLine, LiftDomainError, PowerTrunc, RadialFunction,
                               RatioDomainError, lhs_line, lhs_space, lift, project, ratio,
                               rhs_line, rhs_space)
from bihardy.weights import (Constant, Custom, LineWeights, Power, SinhPower, WeightTriple,
                             build_line_weights)

E222 = ExponentSystem(2, 2, 2)
Q4 = RadialGeometry.homogeneous(4)
Q4W = WeightTriple(Power(-6), Power(3), Power(3))
UNIT = PowerTrunc(0.0, 0.0, 1.0)


def b1_datum():
    return LineWeights.from_line(Power(-3), Constant(), Constant(), E222)


def test_power_trunc_validation():
    with pytest.raises(ValueError):
        PowerTrunc(0.0, 2.0, 1.0)
    with pytest.raises(ValueError):
        PowerTrunc(-1.0, 0.0, 1.0)


@pytest.mark.parametrize("a,lo,hi", [(0.5, 0.1, 10.0), (-1.0, 0.5, 3.0), (-2.5, 1.0, 4.0),
                                     (1.0, 0.0, 2.0)])
def test_power_trunc_cumulative_is_exact(a, lo, hi):
    F = PowerTrunc(a, lo, hi)
    tau = np.array([lo * 0.5 + 1e-3, (lo + hi) / 2, hi, 2 * hi])
    if a == -1.0:
        prim = lambda x: math.log(x)
    else:
        prim = lambda x: x ** (a + 1) / (a + 1)
    exact = [0.0 if t <= lo else prim(min(t, hi)) - (prim(lo) if lo > 0 else 0.0) for t in tau]
    got = np.exp(F.log_cumulative(tau))
    assert np.allclose(got, exact, rtol=1e-13, atol=0)


def test_project_zero():
    F = project(RadialFunction.zero(), Q4)
    assert np.all(F(np.array([0.5, 1.5])) == 0.0)


def test_project_homogeneous_example():
    F = project(RadialFunction.power(-2.0, 1.0, 2.0), Q4)
    s = np.array([0.5, 1.2, 1.9, 2.5])
    assert np.allclose(F(s), np.where((s > 1) & (s < 2), s, 0.0), rtol=1e-15)


def test_project_hyperbolic_example():
    F = project(RadialFunction.indicator(0.0, 1.0), RadialGeometry.hyperbolic(2))
    s = np.array([0.2, 0.9, 1.5])
    assert np.allclose(F(s), np.where(s < 1, 2 * math.pi * np.sinh(s), 0.0), rtol=1e-14)


def test_lift_zero_and_unit_density_datum():
    f = lift(ZERO, Q4, Q4W, E222, 1)
    assert f(1.5) == 0.0
    # Q=4 datum: V~1 = 1 and v1^(1-p1') Lambda = 1, so the lift is F / Lambda
    G = PowerTrunc(0.5, 0.1, 10.0)
    f = lift(G, Q4, Q4W, E222, 1)
    t = np.geomspace(0.11, 9.9, 7)
    assert np.allclose(f(t), G(t) / Q4.surface_density(t), rtol=1e-14)


def test_round_trip_on_log_grid():
    G = PowerTrunc(0.5, 0.1, 10.0)
    t = np.geomspace(0.1 * (1 + 1e-12), 10 * (1 - 1e-12), 50)
    back = project(lift(G, Q4, Q4W, E222, 2), Q4)
    assert np.max(np.abs(back(t) / G(t) - 1)) < 1e-12


def test_lift_domain_error():
    w = WeightTriple(Power(-6), Power(3), Custom(lambda t: np.where(t < 1, 1.0, np.inf)))
    with pytest.raises(LiftDomainError):
        lift(PowerTrunc(0.0, 0.5, 2.0), Q4, w, E222, 2)


def test_lhs_line_examples():
    lw = b1_datum()
    assert lhs_line(ZERO, UNIT, lw, 2) == 0.0
    assert lhs_line(UNIT, UNIT, lw, 2) == pytest.approx(1.0, rel=1e-10)
    div = LineWeights.from_line(Power(-1), Constant(), Constant(), E222)
    assert lhs_line(UNIT, UNIT, div, 2) == math.inf


def test_rhs_line_unit():
    assert rhs_line(UNIT, Constant(), 2) == pytest.approx(1.0, rel=1e-12)


def test_rhs_space_matches_rhs_line_for_lift():
    G = PowerTrunc(0.3, 0.2, 5.0)
    lw = build_line_weights(Q4, Q4W, E222)
    f = lift(G, Q4, Q4W, E222, 1)
    assert rhs_space(f, Q4W.v1, Q4, 2) == pytest.approx(rhs_line(G, lw.vt(1), 2), rel=1e-8)


def test_lhs_space_of_projected_indicator():
    lw = build_line_weights(Q4, Q4W, E222)
    f = RadialFunction(lambda r: -3 * np.log(r), 0.0, 1.0, "1/Lambda", -3.0)
    assert lhs_space(f, f, Q4, Q4W.u, 2) == pytest.approx(lhs_line(UNIT, UNIT, lw, 2), rel=1e-10)


def test_ratio_examples():
    lw = b1_datum()
    r = ratio(UNIT, UNIT, lw)
    assert r == pytest.approx(1.0, rel=1e-10)
    assert 2 ** -0.5 <= r <= 23.324


@pytest.mark.parametrize("c", [0.1, 7.0])
def test_ratio_scaling_invariance(c):
    lw = b1_datum()
    F1, F2 = PowerTrunc(0.4, 0.2, 3.0), PowerTrunc(-0.3, 0.5, 4.0)
    assert ratio(F1.scaled(c), F2, lw) == pytest.approx(ratio(F1, F2, lw), rel=1e-12)


def test_ratio_zero_when_lhs_vanishes():
    # U~ vanishes beyond 0.5 while both cumulative integrals vanish below 1
    tail = LineWeights.from_line(Custom(lambda t: np.where(t < 0.5, 1.0, 0.0), (0.0, None)),
                                 Constant(), Constant(), E222)
    assert ratio(PowerTrunc(0.0, 1.0, 2.0), PowerTrunc(0.0, 1.0, 2.0), tail) == 0.0


def test_ratio_domain_error():
    lw = b1_datum()
    with pytest.raises(RatioDomainError):
        ratio(ZERO, UNIT, lw)


def test_custom_line_matches_power_trunc():
    lw = b1_datum()
    F = PowerTrunc(0.7, 0.3, 4.0)
    C = CustomLine(lambda t: 0.7 * np.log(t), 0.3, 4.0)
    assert lhs_line(C, C, lw, 2) == pytest.approx(lhs_line(F, F, lw, 2), rel=1e-9)
    assert rhs_line(C, Constant(), 2) == pytest.approx(rhs_line(F, Constant(), 2), rel=1e-12)


@settings(max_examples=15, deadline=None)
@given(st.floats(-1.5, 1.5), st.floats(0.05, 2.0), st.floats(0.3, 3.0),
       st.floats(-1.5, 1.5), st.floats(0.05, 2.0), st.floats(0.3, 3.0))
def test_transfer_identities_hyperbolic(a1, lo1, w1, a2, lo2, w2):
    geo = RadialGeometry.hyperbolic(3)
    w = WeightTriple(SinhPower(-3.5), SinhPower(0.5), SinhPower(1.5))
    e = ExponentSystem(2, 3, 3)
    lw = build_line_weights(geo, w, e)
    F1 = PowerTrunc(a1, lo1, lo1 * math.exp(w1))
    F2 = PowerTrunc(a2, lo2, lo2 * math.exp(w2))
    f1, f2 = lift(F1, geo, w, e, 1), lift(F2, geo, w, e, 2)
    assert lhs_space(f1, f2, geo, w.u, e.q) == pytest.approx(lhs_line(F1, F2, lw, e.q), rel=1e-8)
    assert rhs_space(f2, w.v2, geo, e.p2) == pytest.approx(rhs_line(F2, lw.vt(2), e.p2),
                                                           rel=1e-8)
