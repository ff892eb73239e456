"""Expression grammar: precedence (notably unary minus vs '^'), rationals,
error reporting, round-trips."""

import pytest
from gmpy2 import mpq

from lyap.parsing import ParseError, parse_poly, parse_ratfunc

XY = ("x", "y")


def ev(text, **point):
    pt = {k: mpq(v) for k, v in point.items()}
    return parse_ratfunc(text, tuple(point)).evaluate(pt)


def test_unary_minus_binds_looser_than_power():
    # -x^2 must parse as -(x^2), not (-x)^2
    assert ev("-x^2", x=3) == -9
    assert ev("(-x)^2", x=3) == 9
    assert ev("-2^2 + x", x=0) == -4


def test_unary_minus_in_products():
    assert ev("2*-x", x=5) == -10
    assert ev("-x*-x", x=3) == 9


def test_double_negation():
    assert ev("--x", x=7) == 7


def test_rational_literals():
    assert ev("3/4 + x", x=0) == mpq(3, 4)
    assert ev("1/3*x", x=3) == 1


def test_power_is_nonnegative_integer_only():
    with pytest.raises(ParseError):
        parse_poly("x^-2", XY)
    with pytest.raises(ParseError):
        parse_poly("x^(1/2)", XY)


def test_unknown_identifier():
    with pytest.raises(ParseError):
        parse_poly("x + z", XY)


def test_trailing_garbage():
    with pytest.raises(ParseError):
        parse_poly("x + ", XY)
    with pytest.raises(ParseError):
        parse_poly("x y", XY)


def test_poly_rejects_variable_denominator():
    with pytest.raises(ParseError):
        parse_poly("1/x", XY)
    # constant denominators are fine
    assert parse_poly("x/2", XY) == parse_poly("1/2*x", XY)


def test_ratfunc_variable_denominator():
    f = parse_ratfunc("(x^2-1)/(x-1)", XY).reduced()
    assert f.den.is_constant()
    assert f.evaluate({"x": mpq(5), "y": mpq(0)}) == 6


def test_parenthesized_negative_exponent_base():
    assert ev("(x - 2)^3", x=1) == -1


def test_roundtrip_exactness():
    for text in ("-x^2 + 3/7*x*y - y", "1 - x", "x^3 - 1/2",
                 "-1/3*x^2*y^2 + x - y + 2"):
        q = parse_poly(text, XY)
        assert parse_poly(str(q), XY) == q


def test_whitespace_insensitive():
    assert parse_poly(" x +\t2*y ", XY) == parse_poly("x+2*y", XY)
