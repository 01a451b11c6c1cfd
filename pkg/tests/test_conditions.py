import math

import numpy as np
import pytest
from scipy import integrate as sint

from bihardy.conditions import (ConditionReport, bracket_constant, eval_B1, eval_B2, eval_B3,
                                eval_B4, eval_B5, eval_B6, eval_B6_alt, eval_report, evaluate,
                                line_report, sup_over_t)
from bihardy.exponents import CaseId, ExponentSystem
from bihardy.geometry import RadialGeometry
from bihardy.weights import Constant, Custom, LineDatum, LineWeights, Power, WeightTriple

HALF = 2 ** -0.5
E222 = ExponentSystem(2, 2, 2)


def line(u, w1, w2, exps):
    return LineDatum(LineWeights.from_line(u, w1, w2, exps))


def test_sup_constant():
    assert sup_over_t(lambda t: np.full(np.shape(t), HALF)) == pytest.approx(HALF, rel=1e-12)


def test_sup_edge_growth_is_infinite():
    assert sup_over_t(lambda t: t ** 0.5 * t ** -1.0 * t ** 0.75) == math.inf
    assert sup_over_t(lambda t: t ** -0.3) == math.inf


def test_sup_interior_maximum():
    assert sup_over_t(lambda t: np.log(t) - t, log=True) == pytest.approx(math.exp(-1), rel=1e-6)


def test_B1_closed_form():
    assert eval_B1(line(Power(-3), Constant(), Constant(), E222)) == pytest.approx(HALF, rel=1e-9)


def test_B1_infinite_at_zero_edge():
    assert eval_B1(line(Power(-5), Constant(), Constant(), E222)) == math.inf


def test_B1_homogeneous_datum():
    datum = LineDatum.from_space(RadialGeometry.homogeneous(4),
                                 WeightTriple(Power(-6), Power(3), Power(3)), E222)
    assert eval_B1(datum) == pytest.approx(HALF, rel=1e-9)


def test_B2_unbalanced_is_infinite():
    assert eval_B2(line(Power(-3), Constant(), Constant(), ExponentSystem(2, 4, 2.5))) == math.inf


def test_B2_balanced_closed_form():
    # (p1, p2, q) = (2, 4, 3): r2 = 12, q' = 3/2; U~ = s^-4, w2 = s^(-1/3), w1 = 1
    e = ExponentSystem(2, 4, 3)
    datum = line(Power(-4), Constant(), Power(-1 / 3), e)
    assert eval_B2(datum) == pytest.approx((1.5 ** 8 / 486) ** (1 / 12), rel=1e-8)
    swapped = line(Power(-4), Power(-1 / 3), Constant(), e.swapped())
    assert eval_B3(LineDatum(swapped.lw)) == pytest.approx(eval_B2(datum), rel=1e-10)


def test_B3_equals_B2_for_symmetric_data():
    datum = line(Custom(lambda t: -4 * np.log1p(t), (0.0, -4.0), is_log=True), Power(0.5),
                 Power(0.5), ExponentSystem(3, 3, 2))
    assert eval_B3(datum) == pytest.approx(eval_B2(datum), rel=1e-12)


def test_infinite_U1_makes_everything_infinite():
    datum = line(Power(-1), Constant(), Constant(), ExponentSystem(4, 4, 1.5))
    for fn in (eval_B1, eval_B2, eval_B3, eval_B4, eval_B5, eval_B6, eval_B6_alt):
        assert fn(datum) == math.inf


def _case_iv_datum():
    u = Custom(lambda t: -5 * np.log1p(t), (0.0, -5.0), is_log=True)
    return line(u, Constant(), Constant(), ExponentSystem(4, 4, 1.5))


def test_B4_beta_oracle():
    # U1 = (1+t)^-4/4 and V1i = t reduce B4^6 to a Beta integral
    from scipy.special import beta
    expected = (beta(10, 7) / 64) ** (1 / 6)
    assert eval_B4(_case_iv_datum()) == pytest.approx(expected, rel=1e-8)


def test_B5_against_nested_quadrature():
    e = ExponentSystem(4, 4, 1.5)
    r2, k = e.r2, e.k
    r2c = r2 / (r2 - 1)

    def I2(t):
        f = lambda s: ((1 + s) ** -4 / 4) ** (r2 / e.q) * s ** (r2 / e.qc)
        return sint.quad(f, t, np.inf, epsabs=0, epsrel=1e-12, limit=200)[0]

    outer = lambda t: I2(t) ** (k / r2) * t ** (k / r2c)
    val = sum(sint.quad(outer, a, b, epsabs=0, epsrel=1e-11, limit=200)[0]
              for a, b in ((0, 1), (1, 10), (10, 100), (100, np.inf)))
    datum = _case_iv_datum()
    assert eval_B5(datum) == pytest.approx(val ** (1 / k), rel=1e-7)
    assert eval_B6(datum) == pytest.approx(eval_B5(datum), rel=1e-10)
    assert eval_B6_alt(datum) == pytest.approx(eval_B5(datum), rel=1e-10)


def test_bracket_case_I():
    low, high = bracket_constant(CaseId("I"), {"B1": HALF}, E222)
    assert low == pytest.approx(HALF)
    assert high == pytest.approx(8 * 17 ** 0.5 * HALF)
    assert high == pytest.approx(23.3238075794, rel=1e-10)


def test_report_case_iv_has_no_bracket():
    rep = evaluate(_case_iv_datum())
    assert rep.case.label() == "CaseIV" and rep.holds and rep.bracket is None


def test_report_homogeneous_examples():
    geo = RadialGeometry.homogeneous(4)
    good = eval_report(geo, WeightTriple(Power(-6), Power(3), Power(3)), E222)
    assert good.holds and good.case.label() == "CaseI"
    assert good.c_low == pytest.approx(HALF, rel=1e-9)
    bad = eval_report(geo, WeightTriple(Power(-5), Power(3), Power(3)), E222)
    assert not bad.holds and bad.B["B1"] == math.inf and bad.bracket is None


def test_report_not_covered():
    rep = eval_report(RadialGeometry.homogeneous(4), WeightTriple(Power(-6), Power(3), Power(3)),
                      ExponentSystem(2, 2, 0.8))
    assert rep.case.label() == "NotCovered" and not rep.holds and rep.diagnostics


@pytest.mark.parametrize("c", [0.5, 3.0])
def test_scale_covariance(c):
    base = eval_B1(line(Power(-3), Constant(), Constant(), E222))
    scaled_u = eval_B1(line(Composite_scaled(Power(-3), c), Constant(), Constant(), E222))
    assert scaled_u == pytest.approx(c ** 0.5 * base, rel=1e-9)
    geo = RadialGeometry.homogeneous(4)
    w = WeightTriple(Power(-6), Power(3), Power(3))
    ref = eval_B1(LineDatum.from_space(geo, w, E222))
    cw = WeightTriple(Power(-6), Composite_scaled(Power(3), c), Power(3))
    assert eval_B1(LineDatum.from_space(geo, cw, E222)) == pytest.approx(c ** -0.5 * ref, rel=1e-9)


def Composite_scaled(f, c):
    from bihardy.weights import Composite
    return Composite([(f, 1.0), (Constant(c), 1.0)])


def test_case_II_swap_symmetry():
    geo = RadialGeometry.homogeneous(3)
    w = WeightTriple(Power(-4.5), Power(0.4), Power(-0.3))
    e = ExponentSystem(4, 2, 2.5)
    rep = eval_report(geo, w, e)
    trans = eval_report(geo, w.swapped(), e.swapped())
    assert rep.case.swapped and not trans.case.swapped
    assert rep.B == trans.B
    assert rep.bracket == trans.bracket


def _shifted(e):
    return Custom(lambda t: e * np.log1p(t), (0.0, e), is_log=True)


def test_bracket_ordering_case_III():
    datum = line(_shifted(-4.0), _shifted(-2.0), _shifted(-3.0), ExponentSystem(3, 4, 2))
    rep = evaluate(datum)
    assert rep.holds and all(math.isfinite(rep.B[n]) for n in ("B1", "B2", "B3"))
    assert rep.c_low <= rep.c_high


def test_report_json_round_trip():
    rep = eval_report(RadialGeometry.homogeneous(4), WeightTriple(Power(-5), Power(3), Power(3)),
                      E222)
    text = rep.to_json()
    back = ConditionReport.from_json(text)
    assert back.to_json() == text
    assert back.B["B1"] == math.inf


def test_line_report_matches_evaluate():
    lw = LineWeights.from_line(Power(-3), Constant(), Constant(), E222)
    assert line_report(lw).B == evaluate(LineDatum(lw)).B
