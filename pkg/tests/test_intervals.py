"""Rational interval arithmetic: containment (the fundamental enclosure
property), even-power tightening, evaluation of polynomials on boxes."""

import random

from gmpy2 import mpq
from hypothesis import given, settings, strategies as st

from lyap.intervals import RationalInterval, interval_eval, interval_eval_rf
from lyap.parsing import parse_poly, parse_ratfunc

XY = ("x", "y")

rationals = st.fractions(min_value=-8, max_value=8, max_denominator=12)


def iv(lo, hi=None):
    return RationalInterval(mpq(lo), mpq(hi if hi is not None else lo))


def test_point_interval():
    p = RationalInterval.point(mpq(3, 2))
    assert p.lo == p.hi == mpq(3, 2)
    assert p.width() == 0


def test_basic_arithmetic():
    a, b = iv(1, 2), iv(-1, 3)
    assert (a + b).lo == 0 and (a + b).hi == 5
    assert (a - b).lo == -2 and (a - b).hi == 3
    m = a * b
    assert m.lo == -2 and m.hi == 6


def test_even_power_tightening():
    # the square of an interval straddling 0 starts at 0, not at lo*hi
    s = iv(-1, 2).pow(2)
    assert s.lo == 0 and s.hi == 4
    c = iv(-1, 2).pow(3)
    assert c.lo == -1 and c.hi == 8


def test_sign_mag_mig():
    assert iv(2, 3).sign() == 1
    assert iv(-3, -2).sign() == -1
    assert iv(-1, 1).sign() == 0
    assert iv(-3, 2).mag() == 3
    assert iv(-3, 2).mig() == 0
    assert iv(2, 5).mig() == 2


def test_hull_split_contains():
    h = iv(0, 1).hull(iv(3, 4))
    assert h.lo == 0 and h.hi == 4
    left, right = iv(0, 2).split()
    assert left.hi == right.lo == 1
    assert iv(0, 2).contains(mpq(1, 3))
    assert iv(0, 2).contains_interval(iv(1, 2))
    assert not iv(0, 1).contains_zero() or iv(0, 1).lo == 0


def test_inverse_excludes_zero():
    inv = iv(2, 4).inverse()
    assert inv.lo == mpq(1, 4) and inv.hi == mpq(1, 2)


def test_interval_eval_trivial():
    c = parse_poly("3/2", XY)
    r = interval_eval(c, {"x": iv(0, 1), "y": iv(0, 1)})
    assert r.lo == r.hi == mpq(3, 2)
    r = interval_eval(parse_poly("x", XY), {"x": iv(0, 1), "y": iv(0, 1)})
    assert r.lo == 0 and r.hi == 1


def test_interval_eval_contains_exact_range():
    # x^2 - x on [0,1] has exact range [-1/4, 0]; the enclosure may be wider
    r = interval_eval(parse_poly("x^2-x", XY), {"x": iv(0, 1), "y": iv(0, 0)})
    assert r.lo <= mpq(-1, 4) and r.hi >= 0


def test_interval_eval_point_box_is_exact():
    p = parse_poly("x^3-2*x*y+5", XY)
    pt = {"x": mpq(4, 3), "y": mpq(-7, 5)}
    box = {k: RationalInterval.point(v) for k, v in pt.items()}
    r = interval_eval(p, box)
    assert r.lo == r.hi == p.evaluate(pt)


@settings(max_examples=200, deadline=None)
@given(rationals, rationals, rationals, rationals, st.randoms())
def test_containment_property(ax, aw, bx, bw, rng):
    # exact evaluation at any point of the box lies inside the enclosure
    box = {"x": iv(mpq(ax), mpq(ax) + abs(mpq(aw))),
           "y": iv(mpq(bx), mpq(bx) + abs(mpq(bw)))}
    p = parse_poly("x^3*y - 2*x*y^2 + x - 5*y + 1/3", XY)
    px = box["x"].lo + mpq(rng.randint(0, 16), 16) * box["x"].width()
    py = box["y"].lo + mpq(rng.randint(0, 16), 16) * box["y"].width()
    enc = interval_eval(p, box)
    val = p.evaluate({"x": px, "y": py})
    assert enc.lo <= val <= enc.hi


def test_interval_eval_rf_containment():
    f = parse_ratfunc("(x+1)/(x+3)", ("x",))
    box = {"x": iv(0, 1)}
    enc = interval_eval_rf(f, box)
    for t in range(5):
        v = f.evaluate({"x": mpq(t, 4)})
        assert enc.lo <= v <= enc.hi


def test_containment_random_bulk():
    # spot-check on many random points in random boxes
    rng = random.Random(0)
    p = parse_poly("2*x^4 - x^2*y + y^3 - 1/7", XY)
    for _ in range(200):
        lo_x = mpq(rng.randint(-20, 20), rng.randint(1, 9))
        lo_y = mpq(rng.randint(-20, 20), rng.randint(1, 9))
        box = {"x": iv(lo_x, lo_x + mpq(rng.randint(0, 10), 7)),
               "y": iv(lo_y, lo_y + mpq(rng.randint(0, 10), 7))}
        px = box["x"].lo + mpq(rng.randint(0, 8), 8) * box["x"].width()
        py = box["y"].lo + mpq(rng.randint(0, 8), 8) * box["y"].width()
        enc = interval_eval(p, box)
        val = p.evaluate({"x": px, "y": py})
        assert enc.lo <= val <= enc.hi
