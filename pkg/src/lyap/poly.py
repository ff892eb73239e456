"""Sparse multivariate polynomials and rational functions over exact rationals.

Coefficients are gmpy2.mpq throughout; no rounding happens anywhere in this
module.  Terms are kept in canonical form (no zero coefficients) and printed
in graded lexicographic order, e.g. ``1/3*a2*a3 - 1/3*b2*b3``.
"""

from __future__ import annotations

from typing import Iterable, Mapping, Sequence

import gmpy2
from gmpy2 import mpq, mpz

Rational = mpq  # arbitrary-precision rational, auto-normalized, denominator > 0


class InexactDivisionError(ArithmeticError):
    """Raised when an exact polynomial division leaves a remainder."""


def rational(x) -> mpq:
    """Coerce ints, strings like '2/3', Fractions or mpq to mpq."""
    if isinstance(x, (mpq, int)):
        return mpq(x)
    if isinstance(x, str):
        return mpq(x)
    if isinstance(x, float):
        raise TypeError("refusing implicit float -> rational conversion: %r" % (x,))
    # Fraction and friends
    return mpq(x.numerator, x.denominator)


def rational_gcd(a: mpq, b: mpq) -> mpq:
    """gcd extended to rationals: gcd(n1/d1, n2/d2) = gcd(n1,n2)/lcm(d1,d2)."""
    if a == 0:
        return abs(b)
    if b == 0:
        return abs(a)
    n = gmpy2.gcd(a.numerator, b.numerator)
    d = gmpy2.lcm(a.denominator, b.denominator)
    return mpq(n, d)


def _merge_vars(va: Sequence[str], vb: Sequence[str]) -> tuple[str, ...]:
    out = list(va)
    seen = set(va)
    for v in vb:
        if v not in seen:
            out.append(v)
            seen.add(v)
    return tuple(out)


def _gradlex_key(exps: tuple[int, ...]):
    return (sum(exps), exps)


class Polynomial:
    """Sparse polynomial with mpq coefficients over an ordered variable tuple.

    ``terms`` maps exponent tuples (one slot per variable, nonnegative) to
    nonzero mpq coefficients.  Instances are treated as immutable.
    """

    __slots__ = ("variables", "terms")

    def __init__(self, variables: Sequence[str], terms: Mapping[tuple[int, ...], mpq]):
        self.variables = tuple(variables)
        nv = len(self.variables)
        t = {}
        for e, c in terms.items():
            c = c if isinstance(c, mpq) else rational(c)
            if c == 0:
                continue
            e = tuple(e)
            if len(e) != nv:
                raise ValueError("exponent tuple length %d != %d variables" % (len(e), nv))
            if any(k < 0 for k in e):
                raise ValueError("negative exponent in %r" % (e,))
            t[e] = c
        self.terms = t

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, variables: Sequence[str] = ()) -> "Polynomial":
        return cls(variables, {})

    @classmethod
    def const(cls, c, variables: Sequence[str] = ()) -> "Polynomial":
        c = rational(c)
        if c == 0:
            return cls(variables, {})
        return cls(variables, {(0,) * len(tuple(variables)): c})

    @classmethod
    def var(cls, name: str, variables: Sequence[str] | None = None) -> "Polynomial":
        variables = (name,) if variables is None else tuple(variables)
        i = variables.index(name)
        e = [0] * len(variables)
        e[i] = 1
        return cls(variables, {tuple(e): mpq(1)})

    def with_variables(self, variables: Sequence[str]) -> "Polynomial":
        """Re-embed into another variable tuple (a superset, any order)."""
        variables = tuple(variables)
        if variables == self.variables:
            return self
        idx = []
        for v in self.variables:
            try:
                idx.append(variables.index(v))
            except ValueError:
                raise ValueError("variable %r missing from target tuple" % v)
        nv = len(variables)
        terms = {}
        for e, c in self.terms.items():
            ne = [0] * nv
            for j, k in zip(idx, e):
                ne[j] = k
            terms[tuple(ne)] = c
        return Polynomial(variables, terms)

    def drop_unused(self) -> "Polynomial":
        """Remove variables that do not occur in any term."""
        used = [i for i in range(len(self.variables))
                if any(e[i] for e in self.terms)]
        if len(used) == len(self.variables):
            return self
        newvars = tuple(self.variables[i] for i in used)
        terms = {tuple(e[i] for i in used): c for e, c in self.terms.items()}
        return Polynomial(newvars, terms)

    # -- basic queries ------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self.terms)

    def constant_value(self) -> mpq:
        if not self.terms:
            return mpq(0)
        [(e, c)] = self.terms.items()
        if sum(e) != 0:
            raise ValueError("not a constant: %s" % self)
        return c

    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def degree_in(self, name: str) -> int:
        if not self.terms:
            return -1
        i = self.variables.index(name)
        return max(e[i] for e in self.terms)

    def used_variables(self) -> tuple[str, ...]:
        return tuple(v for i, v in enumerate(self.variables)
                     if any(e[i] for e in self.terms))

    def leading(self) -> tuple[tuple[int, ...], mpq]:
        """Leading (exponent, coefficient) in graded-lex order."""
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        e = max(self.terms, key=_gradlex_key)
        return e, self.terms[e]

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: _gradlex_key(t[0]), reverse=True)

    # -- arithmetic ---------------------------------------------------

    def _aligned(self, other: "Polynomial"):
        if self.variables == other.variables:
            return self, other
        variables = _merge_vars(self.variables, other.variables)
        return self.with_variables(variables), other.with_variables(variables)

    def __add__(self, other):
        if isinstance(other, (int, mpq)):
            other = Polynomial.const(other, self.variables)
        a, b = self._aligned(other)
        terms = dict(a.terms)
        for e, c in b.terms.items():
            s = terms.get(e, mpq(0)) + c
            if s == 0:
                terms.pop(e, None)
            else:
                terms[e] = s
        return Polynomial(a.variables, terms)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.variables, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, mpq)):
            other = Polynomial.const(other, self.variables)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "Polynomial":
        c = rational(c)
        if c == 0:
            return Polynomial.zero(self.variables)
        return Polynomial(self.variables, {e: c * v for e, v in self.terms.items()})

    def mul(self, other: "Polynomial", trunc: "Truncation | None" = None) -> "Polynomial":
        """Product, optionally truncated (terms above a weighted degree dropped)."""
        if isinstance(other, (int, mpq)):
            return self.scale(other)
        a, b = self._aligned(other)
        if not a.terms or not b.terms:
            return Polynomial.zero(a.variables)
        if len(a.terms) < len(b.terms):
            a, b = b, a
        nv = len(a.variables)
        # pack exponents into single ints for fast dict accumulation
        maxs = [0] * nv
        for e in a.terms:
            for i, k in enumerate(e):
                if k > maxs[i]:
                    maxs[i] = k
        maxb = [0] * nv
        for e in b.terms:
            for i, k in enumerate(e):
                if k > maxb[i]:
                    maxb[i] = k
        bits = [(maxs[i] + maxb[i] + 1).bit_length() for i in range(nv)]
        shifts = [0] * nv
        acc = 0
        for i in range(nv - 1, -1, -1):
            shifts[i] = acc
            acc += bits[i]

        def pack(e):
            k = 0
            for i, x in enumerate(e):
                k |= x << shifts[i]
            return k

        tw = None
        if trunc is not None:
            widx = [i for i, v in enumerate(a.variables) if v in trunc.variables]
            cap = trunc.max_degree

            def wdeg(e):
                return sum(e[i] for i in widx)
            tw = ([(pack(e), wdeg(e), c) for e, c in a.terms.items()],
                  [(pack(e), wdeg(e), c) for e, c in b.terms.items()])
        out: dict[int, mpq] = {}
        if tw is None:
            bp = [(pack(e), c) for e, c in b.terms.items()]
            for ea, ca in a.terms.items():
                ka = pack(ea)
                for kb, cb in bp:
                    k = ka + kb
                    prev = out.get(k)
                    if prev is None:
                        out[k] = ca * cb
                    else:
                        s = prev + ca * cb
                        if s == 0:
                            del out[k]
                        else:
                            out[k] = s
        else:
            ap, bp = tw
            for ka, wa, ca in ap:
                rem = cap - wa
                for kb, wb, cb in bp:
                    if wb > rem:
                        continue
                    k = ka + kb
                    prev = out.get(k)
                    if prev is None:
                        out[k] = ca * cb
                    else:
                        s = prev + ca * cb
                        if s == 0:
                            del out[k]
                        else:
                            out[k] = s
        masks = [(1 << bits[i]) - 1 for i in range(nv)]
        terms = {}
        for k, c in out.items():
            if c == 0:
                continue
            terms[tuple((k >> shifts[i]) & masks[i] for i in range(nv))] = c
        return Polynomial(a.variables, terms)

    def __mul__(self, other):
        return self.mul(other)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        return self.pow(k)

    def pow(self, k: int, trunc: "Truncation | None" = None) -> "Polynomial":
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result = Polynomial.const(1, self.variables)
        base = self
        while k:
            if k & 1:
                result = result.mul(base, trunc)
            k >>= 1
            if k:
                base = base.mul(base, trunc)
        return result

    def truncate(self, trunc: "Truncation") -> "Polynomial":
        widx = [i for i, v in enumerate(self.variables) if v in trunc.variables]
        cap = trunc.max_degree
        terms = {e: c for e, c in self.terms.items()
                 if sum(e[i] for i in widx) <= cap}
        if len(terms) == len(self.terms):
            return self
        return Polynomial(self.variables, terms)

    def exact_div(self, other: "Polynomial") -> "Polynomial":
        """Exact division; raises InexactDivisionError naming the offending term."""
        if isinstance(other, (int, mpq)):
            c = rational(other)
            if c == 0:
                raise ZeroDivisionError("division by zero constant")
            return self.scale(1 / c)
        if other.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        if other.is_constant():
            return self.scale(1 / other.constant_value())
        a, b = self._aligned(other)
        eb, cb = b.leading()
        q_terms: dict[tuple[int, ...], mpq] = {}
        r = a
        while not r.is_zero():
            er, cr = r.leading()
            qe = tuple(x - y for x, y in zip(er, eb))
            if any(x < 0 for x in qe):
                raise InexactDivisionError(
                    "inexact division: remainder leading term %s" %
                    _term_str(er, cr, r.variables))
            qc = cr / cb
            q_terms[qe] = qc
            r = r - Polynomial(r.variables, {qe: qc}).mul(b)
        return Polynomial(a.variables, q_terms)

    def divides(self, other: "Polynomial") -> bool:
        try:
            other.exact_div(self)
            return True
        except InexactDivisionError:
            return False

    # -- calculus / evaluation ----------------------------------------

    def differentiate(self, name: str) -> "Polynomial":
        if name not in self.variables:
            raise ValueError("unknown variable %r" % name)
        i = self.variables.index(name)
        terms = {}
        for e, c in self.terms.items():
            k = e[i]
            if k == 0:
                continue
            ne = e[:i] + (k - 1,) + e[i + 1:]
            terms[ne] = terms.get(ne, mpq(0)) + c * k
        return Polynomial(self.variables, terms)

    def evaluate(self, bindings: Mapping[str, mpq]) -> mpq:
        """Exact full evaluation; every used variable must be bound."""
        vals = []
        for i, v in enumerate(self.variables):
            if v in bindings:
                vals.append(rational(bindings[v]))
            elif any(e[i] for e in self.terms):
                raise ValueError("unbound variable %r" % v)
            else:
                vals.append(mpq(0))
        total = mpq(0)
        for e, c in self.terms.items():
            t = c
            for i, k in enumerate(e):
                if k:
                    t *= vals[i] ** k
            total += t
        return total

    def subs_poly(self, bindings: Mapping[str, "Polynomial"]) -> "Polynomial":
        """Substitute polynomials for variables (unbound variables kept)."""
        variables = self.variables
        for p in bindings.values():
            variables = _merge_vars(variables, p.variables)
        cache: dict[tuple[str, int], Polynomial] = {}

        def powcached(name, k):
            key = (name, k)
            if key not in cache:
                base = bindings[name].with_variables(variables)
                cache[key] = base.pow(k)
            return cache[key]

        out = Polynomial.zero(variables)
        for e, c in self.terms.items():
            t = Polynomial.const(c, variables)
            for i, k in enumerate(e):
                if not k:
                    continue
                v = self.variables[i]
                if v in bindings:
                    t = t.mul(powcached(v, k))
                else:
                    t = t.mul(Polynomial.var(v, variables).pow(k))
            out = out + t
        return out

    def substitute(self, bindings: Mapping[str, "RationalFunction"]) -> "RationalFunction":
        """Substitute rational functions for variables; exact composition."""
        rf_bindings = {k: as_ratfunc(v) for k, v in bindings.items()}
        out = RationalFunction.zero()
        for e, c in self.terms.items():
            t = RationalFunction.const(c)
            for i, k in enumerate(e):
                if not k:
                    continue
                v = self.variables[i]
                if v in rf_bindings:
                    t = t * rf_bindings[v].pow(k)
                else:
                    t = t * RationalFunction.from_poly(Polynomial.var(v).pow(k))
            out = out + t
        return out

    # -- content / normalization --------------------------------------

    def content(self) -> mpq:
        """Rational content: gcd of all coefficients (positive, 0 for zero poly)."""
        g = mpq(0)
        for c in self.terms.values():
            g = rational_gcd(g, c)
            if g == 1:
                break
        return g

    def monomial_content(self) -> tuple[int, ...]:
        """Componentwise minimum exponent over all terms."""
        if not self.terms:
            return (0,) * len(self.variables)
        mins = None
        for e in self.terms:
            if mins is None:
                mins = list(e)
            else:
                for i, k in enumerate(e):
                    if k < mins[i]:
                        mins[i] = k
        return tuple(mins)

    def div_monomial(self, mono: tuple[int, ...]) -> "Polynomial":
        if not any(mono):
            return self
        return Polynomial(self.variables,
                          {tuple(a - b for a, b in zip(e, mono)): c
                           for e, c in self.terms.items()})

    def primitive(self) -> tuple[mpq, "Polynomial"]:
        """(content, primitive part); primitive part has positive leading coeff."""
        if self.is_zero():
            return mpq(0), self
        c = self.content()
        _, lc = self.leading()
        if lc < 0:
            c = -c
        return c, self.scale(1 / c)

    # -- coefficient extraction ---------------------------------------

    def as_univariate(self, name: str) -> dict[int, "Polynomial"]:
        """Coefficients w.r.t. one variable, as polynomials in the full tuple."""
        i = self.variables.index(name)
        out: dict[int, dict] = {}
        for e, c in self.terms.items():
            k = e[i]
            ne = e[:i] + (0,) + e[i + 1:]
            out.setdefault(k, {})[ne] = c
        return {k: Polynomial(self.variables, t) for k, t in out.items()}

    def coeff_of(self, name: str, k: int) -> "Polynomial":
        return self.as_univariate(name).get(k, Polynomial.zero(self.variables))

    def univariate_coeffs(self, name: str) -> list[mpq]:
        """Dense coefficient list [c0, c1, ...]; requires a truly univariate poly."""
        i = self.variables.index(name)
        for e in self.terms:
            if any(e[j] for j in range(len(e)) if j != i):
                raise ValueError("polynomial is not univariate in %r" % name)
        d = self.degree_in(name)
        out = [mpq(0)] * (d + 1)
        for e, c in self.terms.items():
            out[e[i]] = c
        return out

    # -- printing -----------------------------------------------------

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            s = _term_str(e, abs(c), self.variables)
            if not parts:
                parts.append(s if c > 0 else "-" + s)
            else:
                parts.append(("+ " if c > 0 else "- ") + s)
        return " ".join(parts)

    def __repr__(self):
        return "Polynomial(%r, %s)" % (list(self.variables), str(self))

    def __eq__(self, other):
        if isinstance(other, (int, mpq)):
            other = Polynomial.const(other, self.variables)
        if not isinstance(other, Polynomial):
            return NotImplemented
        a, b = self._aligned(other)
        return a.terms == b.terms

    def __hash__(self):
        return hash((self.variables, frozenset(self.terms.items())))


def _term_str(e: tuple[int, ...], c: mpq, variables: tuple[str, ...]) -> str:
    factors = []
    for v, k in zip(variables, e):
        if k == 1:
            factors.append(v)
        elif k > 1:
            factors.append("%s^%d" % (v, k))
    if not factors:
        return str(c)
    if c == 1:
        return "*".join(factors)
    return str(c) + "*" + "*".join(factors)


class Truncation:
    """Drop monomials whose total degree in ``variables`` exceeds ``max_degree``."""

    __slots__ = ("variables", "max_degree")

    def __init__(self, variables: Iterable[str], max_degree: int):
        self.variables = frozenset(variables)
        self.max_degree = max_degree


# ---------------------------------------------------------------------------
# gcd via recursive subresultant PRS
# ---------------------------------------------------------------------------


def _deg(p):
    return len(p) - 1


def _trim(p):
    while p and p[-1].is_zero():
        p.pop()
    return p


def _prem(u, v):
    """Pseudo-remainder lc(v)^(du-dv+1) * u mod v for dense coefficient lists."""
    u = list(u)
    dv = _deg(v)
    lcv = v[-1]
    e = _deg(u) - dv + 1  # exact power of lc(v) required
    while u and _deg(u) >= dv:
        du = _deg(u)
        lcu = u[-1]
        nu = [c.mul(lcv) for c in u]
        shift = du - dv
        for i, c in enumerate(v):
            nu[shift + i] = nu[shift + i] - lcu.mul(c)
        del nu[du:]  # leading term cancels exactly
        u = _trim(nu)
        e -= 1
    if e > 0 and u:
        # degree dropped by more than one at some step; restore the exact
        # lc(v)^(du-dv+1) scaling the subresultant divisions rely on
        m = lcv.pow(e)
        u = [c.mul(m) for c in u]
    return u


def _prs_gcd_univariate(a: list[Polynomial], b: list[Polynomial]) -> list[Polynomial]:
    """Last nonzero element of the subresultant PRS of two primitive dense
    univariate polynomials with Polynomial coefficients (gcd up to content)."""
    if _deg(a) < _deg(b):
        a, b = b, a
    variables = a[0].variables
    one = Polynomial.const(1, variables)
    f, g = a, b
    gs, h = one, one
    while True:
        d = _deg(f) - _deg(g)
        r = _prem(f, g)
        if not r:
            return g
        divisor = gs.mul(h.pow(d))
        f, g = g, [c.exact_div(divisor) for c in r]
        gs = f[-1]
        # h = h^(1-d) * gs^d
        if d == 0:
            pass
        elif d == 1:
            h = gs
        else:
            h = gs.pow(d).exact_div(h.pow(d - 1))
        if _deg(g) == 0:
            return g


def gcd_poly(a: Polynomial, b: Polynomial) -> Polynomial:
    """Greatest common divisor; gcd(0,0)=0, normalized positive leading coeff.

    Rational contents participate: gcd(6x, 4x^2) = 2x.
    """
    if a.is_zero() and b.is_zero():
        return Polynomial.zero(_merge_vars(a.variables, b.variables))
    if a.is_zero():
        _, p = b.primitive()
        return p.scale(abs(b.content()))
    if b.is_zero():
        _, p = a.primitive()
        return p.scale(abs(a.content()))
    a0, b0 = a._aligned(b)
    ca, pa = a0.primitive()
    cb, pb = b0.primitive()
    cg = rational_gcd(ca, cb)
    g = _gcd_primitive(pa, pb)
    _, g = g.primitive()
    return g.scale(cg)


def _gcd_primitive(a: Polynomial, b: Polynomial) -> Polynomial:
    """gcd of primitive polynomials, up to rational scale."""
    used = [v for v in a.variables if v in set(a.used_variables()) | set(b.used_variables())]
    if not used:
        return Polynomial.const(1, a.variables)
    # monomial content split (cheap, always)
    ma, mb = a.monomial_content(), b.monomial_content()
    mg = tuple(min(x, y) for x, y in zip(ma, mb))
    if any(mg):
        g_rest = _gcd_primitive(a.div_monomial(mg), b.div_monomial(mg))
        return Polynomial(a.variables, {mg: mpq(1)}).mul(g_rest)
    # pick the used variable of lowest max degree as the main one
    cand = [(max(a.degree_in(v), 0) + max(b.degree_in(v), 0), v)
            for v in used if a.degree_in(v) > 0 or b.degree_in(v) > 0]
    if not cand:
        return Polynomial.const(1, a.variables)
    _, x = min(cand)
    if a.degree_in(x) <= 0 or b.degree_in(x) <= 0:
        # x occurs in only one of them: gcd divides the other's coefficients
        p, q = (a, b) if a.degree_in(x) > 0 else (b, a)
        cp = _coeff_gcd(p, x)
        if cp.is_constant():
            return Polynomial.const(1, a.variables)
        _, cp = cp.primitive()
        return _gcd_primitive(cp, q)
    ca = _coeff_gcd(a, x)
    cb = _coeff_gcd(b, x)
    cg = _gcd_primitive(ca, cb) if (not ca.is_constant() and not cb.is_constant()) \
        else Polynomial.const(1, a.variables)
    pa = _strip_coeff_content(a, x, ca)
    pb = _strip_coeff_content(b, x, cb)
    da = [pa.coeff_of(x, k) for k in range(pa.degree_in(x) + 1)]
    db = [pb.coeff_of(x, k) for k in range(pb.degree_in(x) + 1)]
    g = _prs_gcd_univariate(da, db)
    if len(g) == 1:
        gp = Polynomial.const(1, a.variables)
    else:
        gp = Polynomial.zero(a.variables)
        xv = Polynomial.var(x, a.variables)
        for k, c in enumerate(g):
            gp = gp + c.mul(xv.pow(k))
        gc = _coeff_gcd(gp, x)
        gp = _strip_coeff_content(gp, x, gc)
    return cg.mul(gp)


def _coeff_gcd(p: Polynomial, x: str) -> Polynomial:
    """gcd of the coefficients of p viewed as univariate in x."""
    g = Polynomial.zero(p.variables)
    for c in p.as_univariate(x).values():
        g = gcd_poly(g, c)
        if g.is_constant() and not g.is_zero():
            break
    return g


def _strip_coeff_content(p: Polynomial, x: str, c: Polynomial) -> Polynomial:
    if c.is_constant():
        _, pp = p.primitive()
        return pp
    return p.exact_div(c)


# ---------------------------------------------------------------------------
# resultants (Sylvester matrix + fraction-free determinant)
# ---------------------------------------------------------------------------


def sylvester_matrix(a: Polynomial, b: Polynomial, name: str) -> list[list[Polynomial]]:
    da, db = a.degree_in(name), b.degree_in(name)
    if da <= 0 or db <= 0:
        raise ValueError("both polynomials must have positive degree in %r" % name)
    ca = a.as_univariate(name)
    cb = b.as_univariate(name)
    variables = _merge_vars(a.variables, b.variables)
    zero = Polynomial.zero(variables)

    def coef(table, k):
        return table.get(k, zero).with_variables(variables)

    n = da + db
    rows = []
    for i in range(db):
        row = [zero] * n
        for k in range(da + 1):
            row[i + (da - k)] = coef(ca, k)
        rows.append(row)
    for i in range(da):
        row = [zero] * n
        for k in range(db + 1):
            row[i + (db - k)] = coef(cb, k)
        rows.append(row)
    return rows


def det_cofactor(m: list[list[Polynomial]]) -> Polynomial:
    n = len(m)
    if n == 0:
        return Polynomial.const(1)
    if n == 1:
        return m[0][0]
    # expand along the row with most zeros
    best = max(range(n), key=lambda i: sum(1 for x in m[i] if x.is_zero()))
    row = m[best]
    total = Polynomial.zero(m[0][0].variables)
    for j, x in enumerate(row):
        if x.is_zero():
            continue
        minor = [[m[i][k] for k in range(n) if k != j] for i in range(n) if i != best]
        s = det_cofactor(minor)
        if (best + j) % 2:
            s = -s
        total = total + x.mul(s)
    return total


def det_bareiss(m: list[list[Polynomial]]) -> Polynomial:
    """Fraction-free (Bareiss) determinant over the polynomial ring."""
    n = len(m)
    if n == 0:
        return Polynomial.const(1)
    m = [row[:] for row in m]
    variables = m[0][0].variables
    sign = 1
    prev = Polynomial.const(1, variables)
    for k in range(n - 1):
        # pivot: nonzero entry with fewest terms (keeps growth down)
        piv = None
        for i in range(k, n):
            if not m[i][k].is_zero():
                if piv is None or len(m[i][k].terms) < len(m[piv][k].terms):
                    piv = i
        if piv is None:
            return Polynomial.zero(variables)
        if piv != k:
            m[k], m[piv] = m[piv], m[k]
            sign = -sign
        pkk = m[k][k]
        for i in range(k + 1, n):
            mik = m[i][k]
            for j in range(k + 1, n):
                num = pkk.mul(m[i][j]) - mik.mul(m[k][j])
                m[i][j] = num.exact_div(prev)
            m[i][k] = Polynomial.zero(variables)
        prev = pkk
    d = m[n - 1][n - 1]
    return d if sign == 1 else -d


def resultant(a: Polynomial, b: Polynomial, name: str) -> Polynomial:
    """Resultant w.r.t. one variable: Sylvester determinant, fraction-free.

    Cofactor expansion below size 7, Bareiss elimination above.
    """
    m = sylvester_matrix(a, b, name)
    if len(m) <= 6:
        r = det_cofactor(m)
    else:
        r = det_bareiss(m)
    # the resultant no longer involves the eliminated variable
    return r


# ---------------------------------------------------------------------------
# RationalFunction
# ---------------------------------------------------------------------------


def as_ratfunc(x) -> "RationalFunction":
    if isinstance(x, RationalFunction):
        return x
    if isinstance(x, Polynomial):
        return RationalFunction.from_poly(x)
    return RationalFunction.const(rational(x))


class RationalFunction:
    """Reduced fraction of two polynomials.

    Construction always strips rational content and common monomial factors
    and normalizes the denominator's leading coefficient positive; the full
    polynomial gcd is applied by ``reduce()`` (and by ``__init__`` when
    ``full=True``).
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Polynomial, den: Polynomial, full: bool = False):
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            num = Polynomial.zero(num.variables)
            den = Polynomial.const(1, num.variables)
        else:
            num, den = num._aligned(den)
            # cheap: monomial factor
            mn, md = num.monomial_content(), den.monomial_content()
            mg = tuple(min(a, b) for a, b in zip(mn, md))
            if any(mg):
                num = num.div_monomial(mg)
                den = den.div_monomial(mg)
            # cheap: make the denominator primitive with positive leading coeff
            cd, den = den.primitive()
            num = num.scale(1 / cd)
            if den.is_constant() and den.constant_value() != 1:
                num = num.scale(1 / den.constant_value())
                den = Polynomial.const(1, den.variables)
        self.num = num
        self.den = den
        if full:
            r = self.reduced()
            self.num, self.den = r.num, r.den

    # -- constructors --------------------------------------------------

    @classmethod
    def from_poly(cls, p: Polynomial) -> "RationalFunction":
        return cls(p, Polynomial.const(1, p.variables))

    @classmethod
    def const(cls, c) -> "RationalFunction":
        return cls.from_poly(Polynomial.const(c))

    @classmethod
    def zero(cls) -> "RationalFunction":
        return cls.const(0)

    def reduced(self) -> "RationalFunction":
        """Fully reduced form (gcd of num and den stripped)."""
        if self.den.is_constant() or self.num.is_zero():
            return self
        g = gcd_poly(self.num, self.den)
        if g.is_constant():
            return self
        return RationalFunction(self.num.exact_div(g), self.den.exact_div(g))

    reduce = reduced

    # -- queries --------------------------------------------------------

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def constant_value(self) -> mpq:
        return self.num.constant_value() / self.den.constant_value()

    def used_variables(self) -> tuple[str, ...]:
        out = list(self.num.used_variables())
        for v in self.den.used_variables():
            if v not in out:
                out.append(v)
        return tuple(out)

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        other = as_ratfunc(other)
        if self.den == other.den:
            return RationalFunction(self.num + other.num, self.den)
        return RationalFunction(self.num.mul(other.den) + other.num.mul(self.den),
                                self.den.mul(other.den))

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other):
        return self + (-as_ratfunc(other))

    def __rsub__(self, other):
        return (-self) + as_ratfunc(other)

    def mul(self, other, trunc: Truncation | None = None) -> "RationalFunction":
        other = as_ratfunc(other)
        # cross-reduce cheaply when one side is a constant
        return RationalFunction(self.num.mul(other.num, trunc),
                                self.den.mul(other.den))

    def __mul__(self, other):
        return self.mul(other)

    __rmul__ = __mul__

    def inverse(self) -> "RationalFunction":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero rational function")
        return RationalFunction(self.den, self.num)

    def __truediv__(self, other):
        return self * as_ratfunc(other).inverse()

    def __rtruediv__(self, other):
        return as_ratfunc(other) * self.inverse()

    def pow(self, k: int) -> "RationalFunction":
        if k < 0:
            return self.inverse().pow(-k)
        return RationalFunction(self.num.pow(k), self.den.pow(k))

    def __pow__(self, k: int):
        return self.pow(k)

    def scale(self, c) -> "RationalFunction":
        return RationalFunction(self.num.scale(c), self.den)

    def truncate(self, trunc: Truncation) -> "RationalFunction":
        return RationalFunction(self.num.truncate(trunc), self.den)

    def substitute(self, bindings: Mapping[str, "RationalFunction"]) -> "RationalFunction":
        den = self.den.substitute(bindings)
        if den.is_zero():
            raise ZeroDivisionError("substitution produces zero denominator")
        return self.num.substitute(bindings) / den

    def evaluate(self, bindings: Mapping[str, mpq]) -> mpq:
        d = self.den.evaluate(bindings)
        if d == 0:
            raise ZeroDivisionError("denominator vanishes at the given point")
        return self.num.evaluate(bindings) / d

    def differentiate(self, name: str) -> "RationalFunction":
        if name not in self.num.variables and name not in self.den.variables:
            raise ValueError("unknown variable %r" % name)
        n, d = self.num, self.den
        if name not in n.variables:
            n = n.with_variables(_merge_vars(n.variables, (name,)))
        if name not in d.variables:
            d = d.with_variables(_merge_vars(d.variables, (name,)))
        return RationalFunction(n.differentiate(name).mul(d) - n.mul(d.differentiate(name)),
                                d.mul(d))

    def __eq__(self, other):
        if isinstance(other, (int, mpq, Polynomial)):
            other = as_ratfunc(other)
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return (self.num.mul(other.den) - other.num.mul(self.den)).is_zero()

    def __hash__(self):
        r = self.reduced()
        return hash((r.num, r.den))

    def __str__(self):
        if self.den.is_constant() and self.den.constant_value() == 1:
            return str(self.num)
        ns = str(self.num)
        if len(self.num.terms) > 1:
            ns = "(%s)" % ns
        ds = str(self.den)
        if len(self.den.terms) > 1:
            ds = "(%s)" % ds
        return "%s / %s" % (ns, ds)

    def __repr__(self):
        return "RationalFunction(%s)" % str(self)
