"""Exact linear algebra: over mpq and over polynomial / rational-function rings."""

from __future__ import annotations

from gmpy2 import mpq

from .poly import Polynomial, RationalFunction, as_ratfunc


def mpq_solve(matrix: list[list[mpq]], rhs_count: int, rhs: list[list]) -> list[list]:
    """Solve A X = B exactly by Gaussian elimination over the rationals.

    ``rhs`` columns may hold any values supporting +, -, and scaling by mpq
    (mpq themselves, Polynomial, RationalFunction); the matrix must be mpq.
    Returns X as a list of rows.  Raises ValueError on a singular matrix.
    """
    n = len(matrix)
    a = [row[:] for row in matrix]
    b = [row[:] for row in rhs]
    perm = list(range(n))
    for k in range(n):
        piv = None
        for i in range(k, n):
            if a[i][k] != 0:
                piv = i
                break
        if piv is None:
            raise ValueError("singular matrix")
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            b[k], b[piv] = b[piv], b[k]
        inv = 1 / a[k][k]
        for i in range(k + 1, n):
            f = a[i][k] * inv
            if f == 0:
                continue
            for j in range(k, n):
                a[i][j] -= f * a[k][j]
            for j in range(rhs_count):
                b[i][j] = b[i][j] - _scaled(b[k][j], f)
    x = [[None] * rhs_count for _ in range(n)]
    for i in range(n - 1, -1, -1):
        inv = 1 / a[i][i]
        for j in range(rhs_count):
            s = b[i][j]
            for k2 in range(i + 1, n):
                s = s - _scaled(x[k2][j], a[i][k2])
            x[i][j] = _scaled(s, inv)
    _ = perm
    return x


def _scaled(v, c: mpq):
    if isinstance(v, (Polynomial, RationalFunction)):
        return v.scale(c)
    return v * c


def mpq_inverse(matrix: list[list[mpq]]) -> list[list[mpq]]:
    n = len(matrix)
    eye = [[mpq(1) if i == j else mpq(0) for j in range(n)] for i in range(n)]
    return mpq_solve(matrix, n, eye)


def mpq_det(matrix: list[list[mpq]]) -> mpq:
    n = len(matrix)
    a = [row[:] for row in matrix]
    det = mpq(1)
    for k in range(n):
        piv = None
        for i in range(k, n):
            if a[i][k] != 0:
                piv = i
                break
        if piv is None:
            return mpq(0)
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            det = -det
        det *= a[k][k]
        inv = 1 / a[k][k]
        for i in range(k + 1, n):
            f = a[i][k] * inv
            if f:
                for j in range(k, n):
                    a[i][j] -= f * a[k][j]
    return det


def rank_pivots_polynomial(matrix: list[list[Polynomial]]):
    """Rank and pivot positions over the fraction field, by fraction-free
    elimination with exact zero tests.

    Pivots are chosen greedily by lowest total degree (ties: lowest column,
    then lowest row index), so the result is deterministic.

    Returns (rank, pivot_rows, pivot_cols).
    """
    if not matrix:
        return 0, [], []
    a = [clear_row_denominators([as_ratfunc(x) for x in row]) for row in matrix]
    nrows, ncols = len(a), len(a[0])
    zero = Polynomial.zero()
    free_rows = list(range(nrows))
    free_cols = list(range(ncols))
    pivot_rows, pivot_cols = [], []
    prev = None
    while free_rows and free_cols:
        best = None
        for i in free_rows:
            for j in free_cols:
                e = a[i][j]
                if e.is_zero():
                    continue
                key = (e.total_degree(), j, i)
                if best is None or key < best[0]:
                    best = (key, i, j)
        if best is None:
            break
        _, pi, pj = best
        pivot_rows.append(pi)
        pivot_cols.append(pj)
        free_rows.remove(pi)
        free_cols.remove(pj)
        piv = a[pi][pj]
        for i in free_rows:
            f = a[i][pj]
            for j in free_cols:
                num = piv.mul(a[i][j]) - f.mul(a[pi][j])
                a[i][j] = num.exact_div(prev) if prev is not None else num
            a[i][pj] = zero
        prev = piv
    return len(pivot_rows), pivot_rows, pivot_cols


def clear_row_denominators(row: list[RationalFunction]) -> list[Polynomial]:
    """Scale a row of rational functions to polynomials (lcm of denominators)."""
    from .poly import gcd_poly
    lcm = Polynomial.const(1)
    for e in row:
        if e.den.is_constant():
            continue
        g = gcd_poly(lcm, e.den)
        lcm = lcm.mul(e.den.exact_div(g))
    return [e.num.mul(lcm.exact_div(e.den)) if not e.is_zero() else
            Polynomial.zero() for e in row]


def rf_solve(matrix: list[list[RationalFunction]],
             rhs: list[RationalFunction]) -> list[RationalFunction]:
    """Solve a square system with rational-function entries exactly."""
    n = len(matrix)
    a = [[as_ratfunc(x) for x in row] for row in matrix]
    b = [as_ratfunc(x) for x in rhs]
    for k in range(n):
        piv = None
        for i in range(k, n):
            if not a[i][k].is_zero():
                if piv is None or (a[i][k].num.total_degree()
                                   < a[piv][k].num.total_degree()):
                    piv = i
        if piv is None:
            raise ValueError("singular matrix over Q(mu)")
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            b[k], b[piv] = b[piv], b[k]
        for i in range(k + 1, n):
            if a[i][k].is_zero():
                continue
            f = (a[i][k] / a[k][k]).reduced()
            for j in range(k, n):
                a[i][j] = (a[i][j] - f * a[k][j]).reduced()
            b[i] = (b[i] - f * b[k]).reduced()
    x = [RationalFunction.zero()] * n
    for i in range(n - 1, -1, -1):
        s = b[i]
        for k2 in range(i + 1, n):
            s = s - a[i][k2] * x[k2]
        x[i] = (s / a[i][i]).reduced()
    return x
