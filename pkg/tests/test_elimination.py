"""Resultant elimination cascade: factor stripping and bookkeeping, script
parsing, branch solving and variety comparison helpers."""

import pytest
from gmpy2 import mpq

from lyap.elimination import (CUBIC_SYMMETRY, DEFAULT_SCRIPT_TEXT,
                              default_script, eliminate_step, parse_script,
                              same_variety, simplest_rational, strip_factors,
                              symmetry_image, verify_solution)
from lyap.parsing import parse_poly, parse_ratfunc
from lyap.poly import Polynomial

from conftest import CUBIC_PARAMS


def pv(text, vs=("x", "a", "b")):
    return parse_poly(text, vs)


def test_eliminate_trivial_pair():
    st = eliminate_step([pv("x - b"), pv("x^2 - a")], "x")
    assert len(st.outputs) == 1
    out, removed = st.outputs[0]
    assert out == pv("b^2 - a") or out == pv("a - b^2")
    assert removed == []


def test_eliminate_identically_zero_reported():
    # p and p*q share the full component p: the resultant vanishes identically
    p = pv("x - b")
    q = pv("x - a")
    st = eliminate_step([p, p * q], "x")
    out, _removed = st.outputs[0]
    assert out.is_zero()


def test_strip_factor_bookkeeping():
    raw = pv("a^2*b^2 - a^2", ("a", "b"))
    cand = [pv("a", ("a", "b"))]
    stripped, removed = strip_factors(raw, cand)
    # stripped * prod(removed^mult) == raw up to a rational constant
    rebuilt = stripped
    for f, m in removed:
        for _ in range(m):
            rebuilt = rebuilt * f
    from lyap.lyapunov import proportionality
    assert proportionality(rebuilt, raw) is not None
    assert ("a",) == tuple(f.used_variables()[0] for f, m in removed) or \
        all(f.used_variables() == ("a",) for f, m in removed)
    assert stripped.degree_in("a") == 0


def test_eliminate_strips_candidates():
    st = eliminate_step([pv("x*a - b"), pv("a*x^2 - 1")], "x",
                        [pv("a")])
    out, removed = st.outputs[0]
    assert all(f == pv("a") for f, _ in removed)
    assert not pv("a").divides(out)


def test_script_parse_and_default():
    script = parse_script("eliminate a2 strip b2, b3\neliminate a1\n",
                          CUBIC_PARAMS)
    assert script[0][0] == "a2"
    assert [str(f) for f in script[0][1]] == ["b2", "b3"]
    assert script[1] == ("a1", [])
    d = default_script()
    assert [v for v, _ in d][:2] == ["a2", "a1"]
    assert parse_script(DEFAULT_SCRIPT_TEXT, CUBIC_PARAMS) is not None


def test_simplest_rational():
    assert simplest_rational(mpq(1, 3), mpq(1, 2)) == mpq(1, 2)
    assert simplest_rational(mpq(-1, 10), mpq(1, 10)) == 0
    assert simplest_rational(mpq(7, 2), mpq(9, 2)) == 4
    r = simplest_rational(mpq(333, 1000), mpq(334, 1000))
    assert mpq(333, 1000) <= r <= mpq(334, 1000)
    assert r.denominator == 3


def test_same_variety():
    a = {"a2": "0", "b2": "0"}
    b = {"b2": "0", "a2": "0"}
    assert same_variety(a, b)
    assert not same_variety(a, {"a2": "0", "b3": "0"})
    # a parametrized constraint equal up to rewriting
    c = {"a2": "b2", "b3": "a3"}
    d = {"b3": "a3", "a2": "b2"}
    assert same_variety(c, d)


def test_symmetry_image():
    # the Kolmogorov x<->y symmetry swaps the two coefficient families
    from lyap.elimination import symmetric_variety
    assert CUBIC_SYMMETRY["a1"] == "b1" and CUBIC_SYMMETRY["a2"] == "b3"
    [img] = symmetry_image([{"a2": mpq(0), "b2": mpq(0)}])
    assert img == {"b3": mpq(0), "a3": mpq(0)}
    # C1 (a2=b2=0) maps to C4 (a3=b3=0) under the swap symmetry
    assert symmetric_variety({"a2": "0", "b2": "0"}, {"a3": "0", "b3": "0"})
    assert not symmetric_variety({"a2": "0", "b2": "0"},
                                 {"a2": "0", "b3": "0"})


def test_verify_solution(cubic_seq6):
    consts = cubic_seq6.constants
    assert verify_solution(consts, {"a2": "0", "b2": "0"})   # center family
    assert not verify_solution(consts, {"a2": "0", "b2": "1", "a1": "1",
                                        "a3": "1", "b1": "1", "b3": "1"})
