"""Lyapunov constants of a normal-form planar system.

A formal first integral Phi = (x^2+y^2)/2 + sum_{p>=3} F_p is built degree by
degree.  At each odd degree i the homogeneous part F_i is determined uniquely;
at each even degree i the obstruction L_{(i-2)/2} multiplying (x^2+y^2)^{i/2}
appears as an extra unknown, together with one normalization row fixing the
rotation-kernel component of F_i to zero.  All linear systems have constant
integer matrices; only the right-hand sides carry the parameters.

Conventions (recorded on every LyapunovSequence):
  * energy normalization: F_2 = (x^2+y^2)/2
  * obstruction exponent: L_j is the coefficient of (x^2+y^2)^(j+1) in
    d(Phi)/dt, i.e. it is extracted at degree 2j+2 (L_1 at degree 4)
  * kernel normalization: the (x^2+y^2)^(i/2) component of each even F_i is 0
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Mapping, Sequence

from gmpy2 import mpq

from .linalg import mpq_solve
from .poly import (Polynomial, RationalFunction, Truncation, as_ratfunc,
                   rational, rational_gcd)
from .system import NormalFormSystem

CONVENTION = {
    "energy_normalization": "(x^2+y^2)/2",
    "obstruction_exponent": "L_j extracted at degree 2j+2",
    "kernel_normalization": "0",
    # Global positive factor applied to every raw obstruction coefficient,
    # calibrated so the cubic Kolmogorov family gives L_1 = (a2*a3 - b2*b3)/3.
    "scale": "8/3",
}

_SCALE = mpq(8, 3)


@dataclass
class FirstIntegralTruncation:
    """Homogeneous parts F_p, 3 <= p <= 2N+2, as coefficient vectors.

    ``parts[p][l]`` is the coefficient of x^(p-l) y^l in F_p.
    """

    parts: dict[int, list[RationalFunction]]

    def as_polynomial(self, state=("x", "y")) -> tuple:
        """(numerator Polynomial of sum F_p with common denominator) pairs per degree;
        mainly for inspection and tests."""
        out = {}
        x, y = state
        for p, vec in self.parts.items():
            acc = RationalFunction.zero()
            xv = Polynomial.var(x)
            yv = Polynomial.var(y)
            for l, c in enumerate(vec):
                acc = acc + c * as_ratfunc(xv.pow(p - l).mul(yv.pow(l)))
            out[p] = acc
        return out


@dataclass
class LyapunovSequence:
    constants: list[RationalFunction]
    convention: dict = field(default_factory=lambda: dict(CONVENTION))
    integral: FirstIntegralTruncation | None = None
    parameters: tuple[str, ...] = ()

    def __len__(self):
        return len(self.constants)

    def __getitem__(self, j):
        """1-based: seq[1] is L_1."""
        if not 1 <= j <= len(self.constants):
            raise IndexError("L_%d not computed" % j)
        return self.constants[j - 1]


class ResourceError(RuntimeError):
    pass


_MAX_DEGREE_CAP = 600


def _rotation_rows(i: int) -> list[list[mpq]]:
    """Matrix of F |-> x F_y - y F_x on degree-i coefficient vectors
    (basis x^(i-l) y^l, l = 0..i)."""
    a = [[mpq(0)] * (i + 1) for _ in range(i + 1)]
    for m in range(i + 1):
        if m + 1 <= i:
            a[m][m + 1] = mpq(m + 1)
        if m - 1 >= 0:
            a[m][m - 1] = mpq(-(i - m + 1))
    return a


def _kernel_vector(i: int) -> list[mpq]:
    """Coefficient vector of (x^2+y^2)^(i/2) for even i."""
    k = [mpq(0)] * (i + 1)
    for t in range(i // 2 + 1):
        k[2 * t] = mpq(comb(i // 2, t))
    return k


def _nonlinear_parts(sys: NormalFormSystem):
    """Homogeneous parts of (P + y, Q - x) of degree >= 2, as coefficient
    vectors indexed by the power of y."""
    out = []
    for f in (sys.P, sys.Q):
        byd = sys.state_homogeneous_parts(f)
        parts: dict[int, list[RationalFunction]] = {}
        for d, mons in byd.items():
            if d < 2:
                continue
            vec = [RationalFunction.zero()] * (d + 1)
            for (a, b), c in mons.items():
                vec[b] = vec[b] + c
            parts[d] = vec
        out.append(parts)
    return out


def _conv(av: Sequence[RationalFunction], bv: Sequence[RationalFunction],
          trunc: Truncation | None) -> list[RationalFunction]:
    n = len(av) + len(bv) - 1
    out = [RationalFunction.zero()] * n
    for a, ca in enumerate(av):
        if ca.is_zero():
            continue
        for b, cb in enumerate(bv):
            if cb.is_zero():
                continue
            out[a + b] = out[a + b] + ca.mul(cb, trunc)
    return out


def compute_lyapunov(sys: NormalFormSystem, N: int,
                     trunc: Truncation | None = None,
                     keep_integral: bool = False) -> LyapunovSequence:
    """First N Lyapunov constants, exact in the system's parameters.

    ``trunc`` optionally truncates all coefficient arithmetic to a jet in a
    set of (perturbation) parameters, which keeps first/second-order
    bifurcation computations tractable.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    top = 2 * N + 2
    if top > _MAX_DEGREE_CAP:
        raise ResourceError("degree %d exceeds the configured cap %d"
                            % (top, _MAX_DEGREE_CAP))
    pparts, qparts = _nonlinear_parts(sys)
    maxsrc = max([2] + list(pparts) + list(qparts))
    # F_2 = (x^2 + y^2)/2
    F: dict[int, list[RationalFunction]] = {
        2: [RationalFunction.const(mpq(1, 2)), RationalFunction.zero(),
            RationalFunction.const(mpq(1, 2))]}
    constants: list[RationalFunction] = []
    deep = any(not c.den.is_constant()
               for parts in (pparts, qparts) for v in parts.values() for c in v)
    for i in range(3, top + 1):
        g = [RationalFunction.zero()] * (i + 1)
        for m in range(2, min(maxsrc, i - 1) + 1):
            k = i + 1 - m
            fk = F.get(k)
            if fk is None:
                continue
            pm = pparts.get(m)
            qm = qparts.get(m)
            if pm is not None:
                fx = [fk[l].scale(k - l) for l in range(k)]
                for l, c in enumerate(_conv(fx, pm, trunc)):
                    g[l] = g[l] + c
            if qm is not None:
                fy = [fk[l + 1].scale(l + 1) for l in range(k)]
                for l, c in enumerate(_conv(fy, qm, trunc)):
                    g[l] = g[l] + c
        rot = _rotation_rows(i)
        if i % 2 == 1:
            rhs = [[-gm] for gm in g]
            sol = mpq_solve(rot, 1, rhs)
            F[i] = [row[0] for row in sol]
        else:
            kv = _kernel_vector(i)
            n = i + 2
            a = [[mpq(0)] * n for _ in range(n)]
            for m in range(i + 1):
                for c in range(i + 1):
                    a[m][c] = rot[m][c]
                a[m][i + 1] = -kv[m]
            for c in range(i + 1):
                a[i + 1][c] = kv[c]
            rhs = [[-gm] for gm in g] + [[RationalFunction.zero()]]
            sol = mpq_solve(a, 1, rhs)
            F[i] = [sol[m][0] for m in range(i + 1)]
            L = sol[i + 1][0].scale(_SCALE)
            if deep:
                L = L.reduced()
            constants.append(L)
        if deep:
            F[i] = [c.reduced() for c in F[i]]
    integral = FirstIntegralTruncation(F) if keep_integral else None
    return LyapunovSequence(constants, dict(CONVENTION), integral, sys.params)


def evaluate_lyapunov_at(sys: NormalFormSystem, point: Mapping[str, object],
                         N: int) -> list[mpq]:
    """Fast path: bind all parameters first, then run the recursion over mpq."""
    bound = sys.specialize({k: rational(v) for k, v in point.items()})
    if bound.params:
        raise ValueError("unbound parameters: %s" % (bound.params,))
    seq = compute_lyapunov(NormalFormSystem.from_planar(bound), N)
    return [c.constant_value() for c in seq.constants]


def weak_focus_order(sys: NormalFormSystem, point: Mapping[str, object],
                     maxN: int) -> int | None:
    """Smallest j <= maxN with L_j(point) != 0, or None if all vanish."""
    vals = evaluate_lyapunov_at(sys, point, maxN)
    for j, v in enumerate(vals, 1):
        if v != 0:
            return j
    return None


def solve_linear_rule(L: RationalFunction, var: str) -> RationalFunction:
    """From L == 0, linear in ``var``, derive the substitution var -> expr."""
    num = L.num
    d = num.degree_in(var)
    if d != 1:
        raise ValueError("constant is not linear in %r (degree %d)" % (var, d))
    A = num.coeff_of(var, 1)
    B = num.coeff_of(var, 0)
    if A.is_zero():
        raise ValueError("pivot coefficient of %r vanishes identically" % var)
    return RationalFunction(-B, A)


def reduce_mod_prior(L: RationalFunction,
                     rules: Sequence[tuple[str, RationalFunction]]) -> Polynomial:
    """Apply substitution rules (var -> expr) derived from prior constants,
    then clear denominators and rational content."""
    r = as_ratfunc(L)
    for var, expr in rules:
        r = r.substitute({var: as_ratfunc(expr)}).reduced()
    if r.is_zero():
        return Polynomial.zero(r.num.variables)
    _, p = r.num.primitive()
    return p


def proportionality(a: Polynomial, b: Polynomial) -> mpq | None:
    """c with a == c*b, or None.  Zero polynomials are proportional to zero only."""
    if a.is_zero() or b.is_zero():
        return mpq(0) if (a.is_zero() and b.is_zero()) else None
    av = a.drop_unused()
    bv = b.drop_unused()
    if av.variables != bv.variables or set(av.terms) != set(bv.terms):
        return None
    c = None
    for e, ca in av.terms.items():
        r = ca / bv.terms[e]
        if c is None:
            c = r
        elif c != r:
            return None
    return c
