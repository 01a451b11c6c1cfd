import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from bihardy.exponents import ExponentDomainError, ExponentSystem, conjugate, dispatch_case

DISPATCH_TABLE = [
    ((2.0, 2.0, 2.0), "CaseI"),
    ((1.5, 3.0, 4.0), "CaseI"),
    ((3.0, 3.0, 3.0), "CaseI"),
    ((2.0, 4.0, 2.5), "CaseII"),
    ((4.0, 2.0, 2.5), "CaseII_swap"),
    ((1.5, 6.0, 3.0), "CaseII"),
    ((3.0, 3.0, 2.0), "CaseIII"),
    ((4.0, 4.0, 2.0), "CaseIII"),
    ((2.5, 5.0, 2.0), "CaseIII"),
    ((4.0, 4.0, 1.5), "CaseIV"),
    ((6.0, 3.0, 1.5), "CaseIV"),
    ((2.0, 2.0, 0.8), "NotCovered"),
]


@pytest.mark.parametrize("triple,label", DISPATCH_TABLE)
def test_dispatch_table(triple, label):
    assert dispatch_case(ExponentSystem(*triple)).label() == label


def test_not_covered_has_reason():
    case = dispatch_case(ExponentSystem(2, 2, 0.8))
    assert not case.covered and "q" in case.reason


def test_derived_exponents():
    e = ExponentSystem(2.0, 4.0, 2.5)
    assert e.p1c == 2.0 and e.p2c == pytest.approx(4 / 3)
    assert e.qc == pytest.approx(5 / 3)
    assert e.r1 is None
    assert e.r2 == pytest.approx(1 / (1 / 2.5 - 1 / 4))
    assert e.k is None
    assert ExponentSystem(4, 4, 1.5).k == pytest.approx(1 / (1 / 1.5 - 0.5))


@pytest.mark.parametrize("bad", [(1.0, 2.0, 2.0), (2.0, math.inf, 2.0), (2.0, 2.0, 0.0),
                                 (2.0, 2.0, math.nan)])
def test_invalid_exponents(bad):
    with pytest.raises(ExponentDomainError):
        ExponentSystem(*bad)


def test_conjugate_rejects_p_le_1():
    with pytest.raises(ExponentDomainError):
        conjugate(1.0)


ps = st.floats(1.01, 20.0)


@given(ps)
def test_conjugate_identity(p):
    assert 1 / p + 1 / conjugate(p) == pytest.approx(1.0, rel=1e-12)


@given(ps, ps, st.floats(0.2, 20.0))
def test_dispatch_is_total_and_swap_consistent(p1, p2, q):
    e = ExponentSystem(p1, p2, q)
    a, b = dispatch_case(e), dispatch_case(e.swapped())
    assert a.name == b.name
    if a.name == "II" and p1 != p2:
        assert a.swapped != b.swapped


@given(ps, ps, st.floats(1.01, 20.0))
def test_dispatch_matches_definitions(p1, p2, q):
    name = dispatch_case(ExponentSystem(p1, p2, q)).name
    if max(p1, p2) <= q:
        assert name == "I"
    elif min(p1, p2) <= q:
        assert name == "II"
    elif 1 / q <= 1 / p1 + 1 / p2:
        assert name == "III"
    else:
        assert name == "IV"
