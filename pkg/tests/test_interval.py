import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from expthresh.errors import IndeterminateAtPrecision
from expthresh.interval import (Const, Interval, compare, e_interval, exact_root, iroot_floor,
                                precision, rpow, to_interval)

fracs = st.fractions(min_value=Fraction(-50), max_value=Fraction(50), max_denominator=1000)
pos = st.fractions(min_value=Fraction(1, 100), max_value=Fraction(50), max_denominator=1000)


def test_e_enclosure_contains_float_e():
    E = e_interval()
    assert abs(float(E.mid) - math.e) < 1e-15
    assert E.lo < Fraction(2718281828459045235, 10 ** 18) + Fraction(1, 10 ** 18) and E.hi > Fraction(2718281828459045235, 10 ** 18)
    assert E.width < Fraction(1, 2 ** 120)


def test_e_enclosure_tightens_with_precision():
    with precision(64):
        a = e_interval()
    with precision(512):
        b = e_interval()
    assert a.lo <= b.lo and b.hi <= a.hi
    assert b.width < a.width


@given(fracs, fracs, fracs, fracs)
def test_arithmetic_encloses_exact_result(a, b, c, d):
    x, y = Interval(min(a, b), max(a, b)), Interval(min(c, d), max(c, d))
    for u in (x.lo, x.hi, x.mid):
        for v in (y.lo, y.hi, y.mid):
            assert (x + y).contains(u + v)
            assert (x - y).contains(u - v)
            assert (x * y).contains(u * v)


@given(pos, st.integers(min_value=1, max_value=6))
def test_root_encloses_and_powers_back(x, k):
    r = Interval(x).root(k)
    assert (r ** k).contains(x)
    assert r.lo ** k <= x <= r.hi ** k


@given(st.integers(min_value=0, max_value=10 ** 30), st.integers(min_value=1, max_value=7))
def test_iroot_floor(a, k):
    r = iroot_floor(a, k)
    assert r ** k <= a < (r + 1) ** k


def test_exact_root_detects_perfect_powers():
    assert exact_root(Fraction(9, 4), 2) == Fraction(3, 2)
    assert exact_root(Fraction(2), 2) is None


def test_rpow_rational_exponent():
    v = rpow(Interval(Fraction(8)), Fraction(2, 3))
    assert v.contains(4)
    v = rpow(Interval(Fraction(2)), Fraction(-1, 2))
    assert abs(float(v.mid) - 2 ** -0.5) < 1e-15
    assert (v * v).contains(Fraction(1, 2))


def test_const_symbolic_algebra():
    c = Const(4, 1) * Const(Fraction(1, 2), 1)
    assert c == Const(2, 2)
    assert (Const(6, 2) / Const(3, 2)).exact() == 2
    assert (Const(4, 0, ((Fraction(10), Fraction(1, 2)),)) ** 2).exact() == 160
    assert str(Const(1024, 2)) == "1024e^2"
    assert Const.from_json(Const(3, 1, ((Fraction(5), Fraction(1, 3)),)).to_json()) == \
        Const(3, 1, ((Fraction(5), Fraction(1, 3)),))


def test_const_interval_encloses_float():
    c = Const(4, 1)
    assert abs(float(c.interval().mid) - 4 * math.e) < 1e-12


def test_compare_identical_constants_is_exact():
    assert compare(Const(1024, 2), Const(1024, 2)) == 0
    assert compare(Const(4, 1), Fraction(10)) > 0
    assert compare(Const(4, 1), Fraction(11)) < 0


def test_compare_escalates_then_gives_up():
    e = Const(1, 1)
    # a rational within 2^-600 of e, but not equal
    lo = to_interval(e)
    with precision(1024):
        close = e_interval().lo
    assert compare(e, close, max_prec=2048) > 0
    with pytest.raises(IndeterminateAtPrecision):
        compare(e, close, max_prec=256)
    assert lo.lo < lo.hi


def test_ceil_exact():
    assert Interval(Fraction(5, 2)).ceil_exact() == 3
    assert Interval(Fraction(3)).ceil_exact() == 3
    with pytest.raises(IndeterminateAtPrecision):
        Interval(Fraction(29, 10), Fraction(31, 10)).ceil_exact()
