"""Exact linear algebra over mpq and over polynomial/rational-function
entries."""

import random

import pytest
from gmpy2 import mpq

from lyap.linalg import (clear_row_denominators, mpq_det, mpq_inverse,
                         mpq_solve, rank_pivots_polynomial, rf_solve)
from lyap.parsing import parse_poly, parse_ratfunc
from lyap.poly import Polynomial


def test_solve_2x2():
    a = [[mpq(2), mpq(1)], [mpq(1), mpq(3)]]
    sol = mpq_solve(a, 1, [[mpq(5)], [mpq(10)]])
    assert sol[0][0] == 1 and sol[1][0] == 3


def test_inverse_and_det():
    a = [[mpq(1), mpq(2)], [mpq(3), mpq(4)]]
    assert mpq_det(a) == -2
    inv = mpq_inverse(a)
    prod = [[sum(a[i][k] * inv[k][j] for k in range(2)) for j in range(2)]
            for i in range(2)]
    assert prod == [[1, 0], [0, 1]]


def test_singular_matrix_rejected():
    a = [[mpq(1), mpq(2)], [mpq(2), mpq(4)]]
    with pytest.raises(ValueError):
        mpq_inverse(a)


def test_random_solve_roundtrip():
    rng = random.Random(3)
    for _ in range(20):
        n = rng.randint(1, 5)
        a = [[mpq(rng.randint(-9, 9), rng.randint(1, 4)) for _ in range(n)]
             for _ in range(n)]
        if mpq_det(a) == 0:
            continue
        x = [[mpq(rng.randint(-9, 9))] for _ in range(n)]
        b = [[sum(a[i][k] * x[k][0] for k in range(n))] for i in range(n)]
        assert mpq_solve(a, 1, b) == x


def test_rank_pivots_identity():
    m = [[Polynomial.const(1 if i == j else 0, ("t",)) for j in range(3)]
         for i in range(3)]
    rank, rows, cols = rank_pivots_polynomial(m)
    assert rank == 3 and rows == [0, 1, 2] and cols == [0, 1, 2]


def test_rank_pivots_dependent_rows():
    p = parse_poly("t", ("t",))
    one = Polynomial.const(1, ("t",))
    m = [[one, p], [p, p * p]]  # second row = t * first row
    rank, rows, cols = rank_pivots_polynomial(m)
    assert rank == 1


def test_clear_row_denominators():
    row = [parse_ratfunc("x/2", ("x",)), parse_ratfunc("1/3", ("x",))]
    cleared = clear_row_denominators(row)
    # all entries become polynomials scaled by a common nonzero constant
    assert all(p.variables == cleared[0].variables for p in cleared)
    ratio = None
    x = {"x": mpq(5)}
    for rfv, pv in zip(row, cleared):
        if rfv.is_zero():
            continue
        r = pv.evaluate(x) / rfv.evaluate(x)
        ratio = r if ratio is None else ratio
        assert r == ratio


def test_rf_solve():
    t = parse_ratfunc("t", ("t",))
    one = parse_ratfunc("1", ("t",))
    # [[t, 1], [1, 1]] x = [t^2 + 1, t + 1]  ->  x = (t, 1)
    m = [[t, one], [one, one]]
    rhs = [t * t + one, t + one]
    x = rf_solve(m, rhs)
    assert (x[0] - t).reduced().is_zero()
    assert (x[1] - one).reduced().is_zero()
