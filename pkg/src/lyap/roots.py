"""Univariate real root isolation via Sturm sequences.

Polynomials are dense mpq coefficient lists [c0, c1, ..., cd] internally;
the public entry point accepts a univariate Polynomial.
"""

from __future__ import annotations

from gmpy2 import mpq

from .intervals import RationalInterval
from .poly import Polynomial, rational


def _trim(c):
    while c and c[-1] == 0:
        c.pop()
    return c


def _deg(c):
    return len(c) - 1


def _eval(c, x):
    acc = mpq(0)
    for co in reversed(c):
        acc = acc * x + co
    return acc


def _diff(c):
    return [c[i] * i for i in range(1, len(c))]


def _rem(a, b):
    """Remainder of a mod b over the rationals."""
    a = list(a)
    db = _deg(b)
    lb = b[-1]
    while _trim(a) and _deg(a) >= db:
        da = _deg(a)
        f = a[-1] / lb
        for i in range(db + 1):
            a[da - db + i] -= f * b[i]
        a.pop()
    return _trim(a)


def _gcd(a, b):
    a, b = list(a), list(b)
    while _trim(b):
        a, b = b, _rem(a, b)
    return _trim(a)


def squarefree_part(c):
    """c / gcd(c, c') — multiplicities collapsed."""
    if _deg(c) < 1:
        return list(c)
    g = _gcd(list(c), _diff(c))
    if _deg(g) < 1:
        return list(c)
    # exact division a/g
    a = list(c)
    q = [mpq(0)] * (_deg(a) - _deg(g) + 1)
    lg = g[-1]
    while _trim(a) and _deg(a) >= _deg(g):
        da = _deg(a)
        f = a[-1] / lg
        q[da - _deg(g)] = f
        for i in range(_deg(g) + 1):
            a[da - _deg(g) + i] -= f * g[i]
        a.pop()
    return _trim(q)


def sturm_sequence(c):
    seq = [list(c), _diff(c)]
    while _trim(seq[-1]):
        r = _rem(seq[-2], seq[-1])
        seq.append([-x for x in r])
    seq.pop()
    return seq


def _variations(seq, x):
    signs = []
    for p in seq:
        v = _eval(p, x)
        if v != 0:
            signs.append(1 if v > 0 else -1)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_roots_halfopen(seq, a, b):
    """Number of distinct real roots in (a, b] of the (squarefree) polynomial."""
    return _variations(seq, a) - _variations(seq, b)


def root_bound(c) -> mpq:
    """Cauchy bound: all real roots lie in [-B, B]."""
    lc = abs(c[-1])
    m = max((abs(x) for x in c[:-1]), default=mpq(0))
    return 1 + m / lc


def isolate_real_roots(p: Polynomial, search: RationalInterval | None = None,
                       var: str | None = None) -> list[RationalInterval]:
    """Disjoint intervals, each containing exactly one real root of p.

    Multiplicities are collapsed via the squarefree part.  Rational roots may
    be returned as width-zero intervals.
    """
    if p.is_zero():
        raise ValueError("cannot isolate roots of the zero polynomial")
    if var is None:
        used = p.used_variables()
        if len(used) > 1:
            raise ValueError("polynomial is not univariate: %s" % (used,))
        var = used[0] if used else (p.variables[0] if p.variables else "x")
    if p.is_constant():
        return []
    c = squarefree_part(p.univariate_coeffs(var))
    if _deg(c) < 1:
        return []
    if search is None:
        b = root_bound(c)
        search = RationalInterval(-b, b)
    seq = sturm_sequence(c)
    lo, hi = rational(search.lo), rational(search.hi)
    out = []
    exact: set = set()
    # pull roots at the endpoints into explicit point intervals
    if _eval(c, lo) == 0:
        exact.add(lo)
        out.append(RationalInterval(lo, lo))
    stack = [(lo, hi)]
    while stack:
        a, b = stack.pop()
        n = count_roots_halfopen(seq, a, b)
        if n == 0:
            continue
        if _eval(c, b) == 0:
            if b not in exact:
                exact.add(b)
                out.append(RationalInterval(b, b))
            n -= 1
            if n == 0:
                continue
        if n == 1 and _eval(c, b) != 0 and _eval(c, a) != 0:
            out.append(RationalInterval(a, b))
            continue
        m = (a + b) / 2
        while _eval(c, m) == 0:
            # midpoint is itself a root; shift slightly
            m = (a + m) / 2
            if m == a:
                break
        stack.append((a, m))
        stack.append((m, b))
    out.sort(key=lambda iv: iv.lo)
    return out


def refine_root(p: Polynomial, interval: RationalInterval, width,
                var: str | None = None) -> RationalInterval:
    """Bisect an isolating interval (sign change at its endpoints or a point
    interval) until its width is at most ``width``."""
    width = rational(width)
    if interval.width() == 0:
        return interval
    if var is None:
        used = p.used_variables()
        var = used[0]
    c = squarefree_part(p.univariate_coeffs(var))
    a, b = interval.lo, interval.hi
    fa = _eval(c, a)
    if fa == 0:
        return RationalInterval(a, a)
    fb = _eval(c, b)
    if fb == 0:
        return RationalInterval(b, b)
    if (fa > 0) == (fb > 0):
        raise ValueError("interval endpoints do not bracket a simple root")
    while b - a > width:
        m = (a + b) / 2
        fm = _eval(c, m)
        if fm == 0:
            return RationalInterval(m, m)
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b, fb = m, fm
    return RationalInterval(a, b)
