from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from vagroup.exact import (
    ONE,
    ZERO,
    CantorPoint,
    Dyadic,
    floor_log2,
    parse_dyadic,
    parse_number,
    parse_point,
)

dyadics = st.builds(Dyadic, st.integers(-10**6, 10**6), st.integers(-60, 20))


@given(dyadics, dyadics)
def test_arithmetic_matches_fraction(a, b):
    fa, fb = a.to_fraction(), b.to_fraction()
    assert (a + b).to_fraction() == fa + fb
    assert (a - b).to_fraction() == fa - fb
    assert (a * b).to_fraction() == fa * fb
    assert (a < b) == (fa < fb)
    assert (a == b) == (fa == fb)


@given(dyadics, st.integers(-40, 40))
def test_mul_pow2(a, k):
    assert a.mul_pow2(k).to_fraction() == a.to_fraction() * Fraction(2) ** k


@given(dyadics)
def test_canonical_mantissa_is_odd(a):
    assert a.m == 0 or a.m % 2 == 1
    assert hash(a) == hash(Dyadic.coerce(a.to_fraction()))


@given(st.fractions(min_value=Fraction(1, 10**9), max_value=10**9))
def test_floor_log2(x):
    k = floor_log2(x)
    assert Fraction(2) ** k <= x < Fraction(2) ** (k + 1)


@pytest.mark.parametrize("text,value", [("3/2^3", Fraction(3, 8)), ("3/8", Fraction(3, 8)), ("1", Fraction(1)), ("0", Fraction(0))])
def test_parse_dyadic(text, value):
    d = parse_dyadic(text)
    assert d.to_fraction() == value
    assert parse_dyadic(str(d)) == d


@pytest.mark.parametrize("bad", ["1/3", "3/2^x", "", "1/2^-1"])
def test_parse_dyadic_rejects(bad):
    with pytest.raises(ValueError):
        parse_dyadic(bad)


def test_parse_number_keeps_rationals():
    assert parse_number("1/3") == Fraction(1, 3)
    assert isinstance(parse_number("2/8"), Dyadic)


def test_cantor_point_ends():
    assert CantorPoint(ZERO, 1) < CantorPoint(ONE, -1)
    with pytest.raises(ValueError):
        CantorPoint(ZERO, -1)
    with pytest.raises(ValueError):
        CantorPoint(ONE, 1)
    with pytest.raises(ValueError):
        CantorPoint(Dyadic(1, -1))
    with pytest.raises(ValueError):
        CantorPoint(Fraction(1, 3), 1)


def test_cantor_order_sides():
    h = Dyadic(1, -1)
    lo, hi = CantorPoint(h, -1), CantorPoint(h, 1)
    third = CantorPoint(Fraction(1, 3))
    assert third < lo < hi < CantorPoint(Fraction(2, 3))
    assert sorted([hi, third, lo]) == [third, lo, hi]


@pytest.mark.parametrize("text", ["1/2^1+", "3/2^2-", "0+", "1-", "1/3", "5/12"])
def test_point_roundtrip(text):
    p = parse_point(text)
    assert parse_point(str(p)) == p


def test_point_needs_side():
    with pytest.raises(ValueError):
        parse_point("1/2")
