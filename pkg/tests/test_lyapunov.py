"""Lyapunov constants: calibration on the cubic Kolmogorov family, trivial
centers, fast evaluation path, weak-focus order, ideal reduction helpers."""

import random

import pytest
from gmpy2 import mpq

from lyap.lyapunov import (CONVENTION, compute_lyapunov, evaluate_lyapunov_at,
                           proportionality, reduce_mod_prior, solve_linear_rule,
                           weak_focus_order)
from lyap.parsing import parse_poly
from lyap.poly import Truncation, as_ratfunc
from lyap.system import NormalFormSystem, parse_system

from conftest import CUBIC_PARAMS, rf


def nf(text):
    s = parse_system(text)
    return NormalFormSystem(s.state, s.params, s.P, s.Q)


def test_linear_center_all_zero():
    seq = compute_lyapunov(nf("vars x y\ndx = -y\ndy = x\n"), 3)
    assert all(c.is_zero() for c in seq.constants)


def test_hamiltonian_cubic_all_zero():
    # exact first integral (x^2+y^2)/2 + x^3/3
    seq = compute_lyapunov(nf("vars x y\ndx = -y\ndy = x + x^2\n"), 3)
    assert all(c.is_zero() for c in seq.constants)


def test_cubic_family_l1_exact(cubic_seq3):
    l1 = cubic_seq3[1]
    target = rf("(a2*a3 - b2*b3)/3")
    assert (l1 - target).reduced().is_zero()
    assert CONVENTION == cubic_seq3.convention
    assert "scale" in cubic_seq3.convention


def test_l1_at_degree_4_convention():
    assert "2j+2" in CONVENTION["obstruction_exponent"]


def test_quadratic_example_l1():
    seq = compute_lyapunov(nf("vars x y\ndx = -y + x^2\ndy = x + x^2\n"), 1)
    assert seq[1].constant_value() == mpq(-2, 3)


def test_evaluate_matches_symbolic(cubic_seq3, cubic_nf):
    rng = random.Random(17)
    for _ in range(20):
        pt = {n: mpq(rng.randint(-6, 6), rng.randint(1, 4))
              for n in CUBIC_PARAMS}
        fast = evaluate_lyapunov_at(cubic_nf, pt, 3)
        slow = [c.evaluate(pt) for c in cubic_seq3.constants]
        assert fast == slow


def test_evaluate_at_center_point(cubic_nf):
    # a2=b2, b3=a3 membership forces vanishing
    pt = {"a1": mpq(1), "a2": mpq(1), "a3": mpq(1),
          "b1": mpq(1), "b2": mpq(1), "b3": mpq(1)}
    assert evaluate_lyapunov_at(cubic_nf, pt, 3) == [0, 0, 0]


def test_evaluate_at_noncenter_point(cubic_nf):
    pt = {"a1": mpq(1), "a2": mpq(1), "a3": mpq(1),
          "b1": mpq(1), "b2": mpq(1), "b3": mpq(2)}
    vals = evaluate_lyapunov_at(cubic_nf, pt, 1)
    assert vals[0] == mpq(-1, 3)


def test_weak_focus_order(cubic_nf):
    rot = nf("vars x y\ndx = -y\ndy = x\n")
    assert weak_focus_order(rot, {}, 4) is None
    pt = {"a1": mpq(1), "a2": mpq(1), "a3": mpq(1),
          "b1": mpq(1), "b2": mpq(1), "b3": mpq(2)}
    assert weak_focus_order(cubic_nf, pt, 3) == 1
    center = {k: mpq(1) for k in CUBIC_PARAMS}
    assert weak_focus_order(cubic_nf, center, 6) is None


def test_reduce_mod_prior(cubic_seq3):
    rule = ("a2", solve_linear_rule(cubic_seq3[1], "a2"))
    assert str(rule[1]) == "b2*b3 / a3"
    assert reduce_mod_prior(cubic_seq3[1], [rule]).is_zero()
    r2 = reduce_mod_prior(cubic_seq3[2], [rule])
    assert "a2" not in r2.used_variables()
    # empty rule set leaves the constant unchanged up to denominator clearing
    r0 = reduce_mod_prior(cubic_seq3[2], [])
    assert proportionality(r0, cubic_seq3[2].reduced().num) is not None


def test_solve_linear_rule_rejects_nonlinear():
    f = as_ratfunc(parse_poly("a2^2 - 1", CUBIC_PARAMS))
    with pytest.raises(ValueError):
        solve_linear_rule(f, "a2")


def test_proportionality():
    a = parse_poly("2*x + 4*y", ("x", "y"))
    b = parse_poly("3*x + 6*y", ("x", "y"))
    assert proportionality(a, b) == mpq(2, 3)
    c = parse_poly("3*x + 5*y", ("x", "y"))
    assert proportionality(a, c) is None


def test_truncation_consistency():
    # computing a lambda-perturbed family with a degree-2 truncation in the
    # lambdas must agree with the full computation truncated afterwards
    text = ("vars x y\nparams l1 l2\n"
            "dx = -y + x^2 + l1*y^2\ndy = x + x^2 + l2*x*y\n")
    s = nf(text)
    tr = Truncation(("l1", "l2"), 2)
    seq_t = compute_lyapunov(s, 2, trunc=tr)
    seq_f = compute_lyapunov(s, 2)
    for ct, cf in zip(seq_t.constants, seq_f.constants):
        a, b = ct.reduced(), cf.reduced()
        # denominators are free of the lambdas, so truncation commutes
        assert b.den.truncate(tr) == b.den
        assert a.den.truncate(tr) == a.den
        diff = a.num.mul(b.den) - b.num.mul(a.den)
        assert diff.truncate(tr).is_zero()


def test_positive_time_rescale_preserves_first_index():
    # scaling the state by a positive constant preserves normal form and the
    # first nonzero index (the constants scale by positive powers)
    base = nf("vars x y\ndx = -y + x^2\ndy = x + x^2\n")
    scaled = nf("vars x y\ndx = -y + 2*x^2\ndy = x + 2*x^2\n")
    s1 = compute_lyapunov(base, 1)[1].constant_value()
    s2 = compute_lyapunov(scaled, 1)[1].constant_value()
    assert s1 < 0 and s2 < 0
