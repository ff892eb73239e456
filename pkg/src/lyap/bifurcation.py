"""First- and second-order bifurcation analysis of Lyapunov constants.

Given a family with perturbation parameters (the "fresh" names added by a
perturbation template), this module extracts the linear parts of the
Lyapunov constants at zero perturbation, computes the rank of that matrix
over the field of family parameters, eliminates the pivot parameters as
truncated power series, and reads the reduced constants off as first-order
coefficient functions or quadratic forms.  The cyclicity accounting turns a
reduced system plus certificates into a certified lower bound on the number
of small-amplitude limit cycles.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from gmpy2 import mpq

from .certify import Indeterminate
from .linalg import rank_pivots_polynomial, rf_solve
from .lyapunov import LyapunovSequence
from .poly import (Polynomial, RationalFunction, as_ratfunc, rational)

__all__ = [
    "LinearPartMatrix", "ReducedSystem", "ReducedConstant",
    "CyclicityReport", "linear_parts", "rank_pivots", "series_eliminate",
    "find_zero", "cyclicity_bound", "rationalize",
]


def _q(x) -> str:
    f = Fraction(int(x.numerator), int(x.denominator)) if isinstance(x, mpq) \
        else Fraction(str(x))
    return "%d/%d" % (f.numerator, f.denominator)


# ---------------------------------------------------------------------------
# Linear parts and rank
# ---------------------------------------------------------------------------

@dataclass
class LinearPartMatrix:
    """Entry (j, l) is the derivative of L_{j+1} in the l-th perturbation
    parameter, evaluated at zero perturbation; entries are rational in the
    remaining (family) parameters."""

    entries: list[list[RationalFunction]]
    lambdas: tuple[str, ...]

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.entries), len(self.lambdas)

    def submatrix(self, rows: Sequence[int] | None = None,
                  cols: Sequence[str] | None = None) -> "LinearPartMatrix":
        ridx = range(len(self.entries)) if rows is None else rows
        names = self.lambdas if cols is None else tuple(cols)
        cidx = [self.lambdas.index(n) for n in names]
        return LinearPartMatrix(
            [[self.entries[i][j] for j in cidx] for i in ridx], names)


def _zero_at(f: RationalFunction, names: Sequence[str]) -> RationalFunction:
    binds = {n: RationalFunction.zero() for n in names
             if n in f.used_variables()}
    return f.substitute(binds) if binds else f


def _dcoeff(f: RationalFunction, lam: str,
            lambdas: Sequence[str]) -> RationalFunction:
    """d f / d lam at all lambdas = 0, exactly."""
    if lam not in f.num.variables and lam not in f.den.variables:
        return RationalFunction.zero()
    df = f.differentiate(lam)
    return _zero_at(df, lambdas).reduced()


def linear_parts(seq: LyapunovSequence, lambdas: Sequence[str]
                 ) -> LinearPartMatrix:
    """Exact gradient of every computed constant in the perturbation
    parameters, at zero perturbation."""
    lambdas = tuple(lambdas)
    missing = [l for l in lambdas if l not in seq.parameters]
    if missing:
        raise ValueError("perturbation parameters %s absent from the "
                         "sequence's parameters %s" % (missing, seq.parameters))
    rows = []
    for L in seq.constants:
        rows.append([_dcoeff(as_ratfunc(L), lam, lambdas) for lam in lambdas])
    return LinearPartMatrix(rows, lambdas)


def rank_pivots(m: LinearPartMatrix) -> dict:
    """Rank over the field of family parameters, with deterministic
    lowest-degree-first pivot selection."""
    from .linalg import clear_row_denominators
    cleared = [clear_row_denominators(row) for row in m.entries]
    rank, prow, pcol = rank_pivots_polynomial(cleared)
    return {"rank": rank,
            "pivot_rows": prow,
            "pivot_columns": [m.lambdas[j] for j in pcol]}


# ---------------------------------------------------------------------------
# Series elimination
# ---------------------------------------------------------------------------

def _as_lambda_poly(f: RationalFunction, lambdas: tuple[str, ...], order: int
                    ) -> dict[tuple[int, ...], RationalFunction]:
    """Split f's numerator by its lambda-exponent pattern (total degree <=
    order kept), coefficients divided by the lambda-free denominator."""
    den = _zero_at(as_ratfunc(f.den), lambdas)
    if den.is_zero():
        raise ValueError("denominator vanishes at zero perturbation")
    num = f.num
    idx = [num.variables.index(l) if l in num.variables else None
           for l in lambdas]
    buckets: dict[tuple[int, ...], dict] = {}
    for e, c in num.terms.items():
        lexp = tuple(e[i] if i is not None else 0 for i in idx)
        if sum(lexp) > order:
            continue
        rest = list(e)
        for i in idx:
            if i is not None:
                rest[i] = 0
        buckets.setdefault(lexp, {})
        key = tuple(rest)
        buckets[lexp][key] = buckets[lexp].get(key, mpq(0)) + c
    out = {}
    inv = den.inverse()
    for lexp, terms in buckets.items():
        p = Polynomial(num.variables, terms)
        if not p.is_zero():
            out[lexp] = (as_ratfunc(p) * inv).reduced()
    return out


@dataclass
class ReducedConstant:
    """One constant after eliminating the pivots: its index (1-based), the
    lowest-order content that survives, and how it is classified."""

    index: int
    kind: str                    # "first-order" | "quadratic" | "undetermined"
    value: RationalFunction      # reduced jet (in surviving parameters)
    distinguished: str | None = None
    f: RationalFunction | None = None      # degree-1 form in the survivors
    common_factor: str | None = None

    def coefficient(self, name: str) -> RationalFunction:
        """Coefficient of one surviving parameter in the degree-1 form."""
        if self.f is None:
            raise ValueError("constant %d has no first-order part" % self.index)
        return self.f.differentiate(name).reduced()

    def to_json(self) -> dict:
        out = {"index": self.index, "kind": self.kind,
               "value": str(self.value)}
        if self.distinguished is not None:
            out["distinguished"] = self.distinguished
        if self.f is not None:
            out["f"] = str(self.f)
        if self.common_factor is not None:
            out["common_factor"] = self.common_factor
        return out


@dataclass
class ReducedSystem:
    r: int
    pivots: tuple[str, ...]
    series: dict[str, RationalFunction]    # pivot -> series in survivors
    reduced: list[ReducedConstant]
    order: int = 2

    def to_json(self) -> dict:
        return {"rank": self.r,
                "pivots": list(self.pivots),
                "series": {k: str(v) for k, v in self.series.items()},
                "order": self.order,
                "reduced": [rc.to_json() for rc in self.reduced]}

    def to_json_text(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def _jet_substitute(f: RationalFunction, series: Mapping[str, RationalFunction],
                    lambdas: tuple[str, ...], order: int) -> RationalFunction:
    """Substitute the pivot series and drop all terms of lambda-degree >
    order (the series have no constant terms, so this is a jet operation)."""
    from .poly import Truncation
    trunc = Truncation(lambdas, order)
    parts = _as_lambda_poly(f, lambdas, order)
    acc = RationalFunction.zero()
    for lexp, coeff in parts.items():
        term = coeff
        for l, k in zip(lambdas, lexp):
            if not k:
                continue
            base = series.get(l, as_ratfunc(Polynomial.var(l)))
            term = term.mul(base.pow(k))
        acc = acc + term
    return acc.truncate(trunc).reduced()


def series_eliminate(seq: LyapunovSequence, lambdas: Sequence[str],
                     pivots: Mapping | None = None, order: int = 2,
                     distinguished: str | None = None) -> ReducedSystem:
    """Solve the first r constants for the pivot parameters as truncated
    series (total degree <= order) in the surviving parameters, substitute
    into the rest, and classify each reduced constant by its lowest
    surviving homogeneous part.

    ``pivots`` defaults to the deterministic rank_pivots choice; an explicit
    {"pivot_rows": [...], "pivot_columns": [...]} reproduces a hand-picked
    reduction.
    """
    if order != 2:
        raise ValueError("only order 2 is supported (and tested)")
    lambdas = tuple(lambdas)
    m = linear_parts(seq, lambdas)
    if pivots is None:
        pivots = rank_pivots(m)
    r = pivots["rank"]
    prow = list(pivots["pivot_rows"])
    pcol = list(pivots["pivot_columns"])
    if r == 0:
        reduced = _classify(seq, {}, {}, lambdas, order, prow, distinguished)
        return ReducedSystem(0, (), {}, reduced, order)
    survivors = [l for l in lambdas if l not in pcol]

    # linear solve: A * p1 = -(linear part in survivors), over Q(mu)
    a = [[m.entries[i][m.lambdas.index(c)] for c in pcol] for i in prow]
    rhs = []
    for i in prow:
        s = RationalFunction.zero()
        for l in survivors:
            entry = m.entries[i][m.lambdas.index(l)]
            s = s - entry * as_ratfunc(Polynomial.var(l))
        rhs.append(s)
    p1 = rf_solve(a, rhs)
    series1 = {c: p1[k] for k, c in enumerate(pcol)}
    series = dict(series1)

    # quadratic correction: A * p2 = -(quadratic residue of the pivot rows)
    rhs2 = []
    for i in prow:
        res = _jet_substitute(as_ratfunc(seq.constants[i]), series,
                              lambdas, order)
        rhs2.append(-res)
    p2 = rf_solve(a, rhs2)
    for k, c in enumerate(pcol):
        series[c] = (series[c] + p2[k]).reduced()

    reduced = _classify(seq, series, series1, lambdas, order, prow,
                        distinguished)
    return ReducedSystem(r, tuple(pcol), series, reduced, order)


def _homogeneous_in(f: RationalFunction, names: tuple[str, ...], deg: int
                    ) -> RationalFunction:
    parts = _as_lambda_poly(f, names, deg)
    acc = RationalFunction.zero()
    for lexp, coeff in parts.items():
        if sum(lexp) != deg:
            continue
        term = coeff
        for l, k in zip(names, lexp):
            if k:
                term = term * as_ratfunc(Polynomial.var(l)).pow(k)
        acc = acc + term
    return acc.reduced()


def _classify(seq, series, series1, lambdas, order, pivot_rows,
              distinguished):
    """Classify the non-pivot constants.

    First-order residues come from the full second-order series.  The
    quadratic forms, however, are the degree-2 parts of the constants
    restricted to the kernel of the linear parts, i.e. after substituting
    the *first-order* pivot series only; feeding the quadratic correction
    back in would cancel them (they lie in the second-order jet of the
    ideal of the pivot constants), whereas the second-order bifurcation
    argument perturbs along a straight line in that kernel.
    """
    out = []
    dist = distinguished
    for j, L in enumerate(seq.constants):
        if j in pivot_rows:
            continue
        red = _jet_substitute(as_ratfunc(L), series, lambdas, order)
        lin = _homogeneous_in(red, lambdas, 1)
        if not lin.is_zero():
            if dist is None:
                for l in lambdas:
                    if not lin.differentiate(l).is_zero():
                        dist = l
                        break
            # the reduced function is the whole degree-1 form in the
            # surviving parameters, with coefficients rational in mu
            out.append(ReducedConstant(j + 1, "first-order", red,
                                       dist, lin))
            continue
        red1 = _jet_substitute(as_ratfunc(L), series1, lambdas, order)
        quad = _homogeneous_in(red1, lambdas, 2)
        if not quad.is_zero():
            cf = _common_monomial_factor(quad, lambdas)
            out.append(ReducedConstant(j + 1, "quadratic", quad,
                                       common_factor=cf))
        else:
            out.append(ReducedConstant(j + 1, "undetermined", red))
    return out


def _common_monomial_factor(f: RationalFunction, lambdas) -> str | None:
    """A perturbation parameter dividing every term of the form, if any."""
    num = f.num
    for l in lambdas:
        if l not in num.variables:
            continue
        i = num.variables.index(l)
        if num.terms and all(e[i] > 0 for e in num.terms):
            return l
    return None


# ---------------------------------------------------------------------------
# Numerical zero finding (non-certified)
# ---------------------------------------------------------------------------

def rationalize(x: float, max_den: int = 10 ** 15) -> mpq:
    """Nearest continued-fraction convergent with bounded denominator."""
    f = Fraction(x).limit_denominator(max_den)
    return mpq(f.numerator, f.denominator)


def find_zero(fs: Sequence[RationalFunction], seed: Mapping[str, object],
              unknowns: Sequence[str] | None = None, max_iter: int = 60,
              tol: float = 1e-13, max_den: int = 10 ** 15
              ) -> dict[str, mpq]:
    """Floating-point Newton estimate of a common zero, rationalized.

    NOT a certificate — pass the result to the certify module.  Parameters
    not listed in ``unknowns`` stay fixed at their seed values.  Raises
    RuntimeError (with the iterate trace) if Newton does not converge.
    """
    fs = [as_ratfunc(f) for f in fs]
    if unknowns is None:
        unknowns = [v for v in sorted({u for f in fs
                                       for u in f.used_variables()})
                    if v in seed][:len(fs)]
    unknowns = list(unknowns)
    if len(unknowns) != len(fs):
        raise ValueError("need exactly one unknown per function "
                         "(%d functions, unknowns %s)" % (len(fs), unknowns))
    point = {k: float(rational(v)) for k, v in seed.items()}
    jac = [[f.differentiate(u) for u in unknowns] for f in fs]
    trace = []

    def feval(g, pt):
        exact = {k: rationalize(v, 10 ** 18) for k, v in pt.items()}
        return float(g.evaluate(exact))

    for _ in range(max_iter):
        vals = [feval(f, point) for f in fs]
        trace.append((dict(point), vals))
        if max(abs(v) for v in vals) < tol:
            return {u: rationalize(point[u], max_den) for u in unknowns}
        j = [[feval(jac[i][k], point) for k in range(len(unknowns))]
             for i in range(len(fs))]
        try:
            step = _lin_solve_float(j, [-v for v in vals])
        except ZeroDivisionError:
            raise RuntimeError("singular Jacobian during Newton; trace: %s"
                               % trace[-3:])
        for u, s in zip(unknowns, step):
            point[u] += s
    raise RuntimeError("Newton did not converge in %d iterations; "
                       "last iterates: %s" % (max_iter, trace[-3:]))


def _lin_solve_float(a, b):
    n = len(a)
    a = [row[:] + [b[i]] for i, row in enumerate(a)]
    for k in range(n):
        piv = max(range(k, n), key=lambda i: abs(a[i][k]))
        if a[piv][k] == 0:
            raise ZeroDivisionError
        a[k], a[piv] = a[piv], a[k]
        for i in range(k + 1, n):
            f = a[i][k] / a[k][k]
            for j in range(k, n + 1):
                a[i][j] -= f * a[k][j]
    x = [0.0] * n
    for i in range(n - 1, -1, -1):
        s = a[i][n] - sum(a[i][j] * x[j] for j in range(i + 1, n))
        x[i] = s / a[i][i]
    return x


# ---------------------------------------------------------------------------
# Cyclicity accounting
# ---------------------------------------------------------------------------

@dataclass
class CyclicityReport:
    """A certified lower bound on the number of small-amplitude limit
    cycles, with the accounting rule and supporting certificates.

    Rules: rank-only gives r independent constants, hence r cycles;
    first-order adds ell certified simultaneous zeros of the reduced
    coefficient functions with the next one certified nonzero and a
    transversal Jacobian, giving r + ell + 1; second-order uses a chain of
    l quadratic forms vanishing along a certified point with the last one
    certified nonzero, giving r + l.
    """

    method: str                  # "rank-only" | "first-order" | "second-order"
    r: int
    ell: int
    bound: int
    certificates: list = field(default_factory=list)
    point: dict | None = None

    def to_json(self) -> dict:
        return {"method": self.method, "rank": self.r, "ell": self.ell,
                "bound": self.bound,
                "point": ({k: _q(v) for k, v in self.point.items()}
                          if self.point else None),
                "certificates": [c.to_json() if hasattr(c, "to_json")
                                 else str(c) for c in self.certificates]}

    def to_json_text(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def cyclicity_bound(method: str, r: int, ell: int = 0,
                    certificates: Sequence | None = None,
                    point: Mapping | None = None) -> CyclicityReport:
    """Apply the accounting rules; refuses to report a bound whose
    nonzero/zero/transversality claims lack certificates."""
    certificates = list(certificates or [])
    for c in certificates:
        if isinstance(c, Indeterminate) or c is None:
            raise ValueError("indeterminate or missing certificate; "
                             "refusing to report a bound")
    if method == "rank-only":
        bound = r
    elif method == "first-order":
        # ell simultaneous zeros + next coefficient nonzero + transversality
        if len(certificates) < 2:
            raise ValueError(
                "first-order accounting needs a zero-existence certificate "
                "and a nonvanishing certificate")
        bound = r + ell + 1
    elif method == "second-order":
        if not certificates:
            raise ValueError("second-order accounting needs certificates "
                             "for the quadratic chain")
        bound = r + ell
    else:
        raise ValueError("unknown accounting method %r" % method)
    return CyclicityReport(method, r, ell, bound, certificates,
                           dict(point) if point else None)
