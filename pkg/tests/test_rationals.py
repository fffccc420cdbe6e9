from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from sqfeq.errors import InputError
from sqfeq.rationals import (
    format_rational,
    isqrt_exact,
    make_rational,
    parse_rational,
    rational_arith,
)

rationals = st.fractions(max_numerator=10**6, max_denominator=10**4)


def test_make_rational_reduces():
    assert make_rational(50, 100) == Fraction(1, 2)


def test_make_rational_normalizes_signs():
    r = make_rational(-5, -9)
    assert (r.numerator, r.denominator) == (5, 9)


def test_make_rational_canonical_zero():
    r = make_rational(0, 7)
    assert (r.numerator, r.denominator) == (0, 1)


def test_make_rational_rejects_zero_denominator():
    with pytest.raises(InputError):
        make_rational(1, 0)


@given(st.integers(-10**9, 10**9), st.integers(1, 10**6),
       st.integers(-100, 100).filter(lambda c: c != 0))
def test_make_rational_scale_invariant(p, q, c):
    assert make_rational(p, q) == make_rational(c * p, c * q)


def test_arith_case_values():
    # intermediates of the two case analyses
    assert rational_arith("sub", Fraction(25, 3), Fraction(25, 9)) == Fraction(50, 9)
    assert rational_arith("add", Fraction(1, 8), Fraction(1, 16)) == Fraction(3, 16)


def test_arith_divide_by_zero():
    with pytest.raises(ZeroDivisionError):
        rational_arith("div", Fraction(1), Fraction(0))


def test_arith_unknown_op():
    with pytest.raises(InputError):
        rational_arith("mod", Fraction(1), Fraction(2))


@given(rationals)
def test_add_zero_identity(x):
    assert rational_arith("add", x, Fraction(0)) == x


@given(rationals, rationals)
def test_add_mul_commutative(a, b):
    assert rational_arith("add", a, b) == rational_arith("add", b, a)
    assert rational_arith("mul", a, b) == rational_arith("mul", b, a)


@given(rationals, rationals, rationals)
def test_associative_distributive(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c


def test_isqrt_examples():
    assert isqrt_exact(41) == (6, False)
    assert isqrt_exact(16) == (4, True)
    assert isqrt_exact(0) == (0, True)


def test_isqrt_rejects_negative():
    with pytest.raises(InputError):
        isqrt_exact(-1)


@given(st.integers(0, 10**18))
def test_isqrt_bounds(n):
    root, exact = isqrt_exact(n)
    assert root * root <= n < (root + 1) * (root + 1)
    assert exact == (root * root == n)


def test_format_rational():
    assert format_rational(Fraction(3, 4)) == "3/4"
    assert format_rational(Fraction(-7, 2)) == "-7/2"
    assert format_rational(Fraction(5)) == "5"
    assert format_rational(Fraction(0)) == "0"


@given(rationals)
def test_format_parse_roundtrip(x):
    assert parse_rational(format_rational(x)) == x


def test_parse_rational_rejects_garbage():
    for bad in ("", "x", "1/0", "1.5", "1/ 2/3"):
        with pytest.raises(InputError):
            parse_rational(bad)
