"""Planar polynomial vector fields with exact parametric coefficients.

A PlanarSystem holds dx/dt = P, dy/dt = Q as rational functions of the two
state variables and any number of parameters; denominators never involve the
state variables.  Kolmogorov construction, affine changes of coordinates,
structure-preserving perturbation templates and the symmetry/monodromy checks
live here.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from gmpy2 import mpq

from .parsing import ParseError, parse_poly, parse_ratfunc
from .poly import (Polynomial, RationalFunction, as_ratfunc, rational,
                   _merge_vars)


class SystemError(ValueError):
    pass


class PlanarSystem:
    """Pair (P, Q) over state variables (exactly two) and parameters."""

    def __init__(self, state: Sequence[str], params: Sequence[str],
                 P, Q):
        state = tuple(state)
        if len(state) != 2:
            raise SystemError("exactly two state variables required")
        self.state = state
        self.params = tuple(params)
        allvars = state + self.params
        P, Q = as_ratfunc(P), as_ratfunc(Q)
        for name, f in (("P", P), ("Q", Q)):
            for v in f.used_variables():
                if v not in allvars:
                    raise SystemError("undeclared variable %r in %s" % (v, name))
            for v in state:
                if v in f.den.used_variables():
                    raise SystemError("state variable %r in a denominator" % v)
        self.P = _embed(P, allvars)
        self.Q = _embed(Q, allvars)

    @property
    def variables(self) -> tuple[str, ...]:
        return self.state + self.params

    def field(self) -> tuple[RationalFunction, RationalFunction]:
        return self.P, self.Q

    def jacobian(self) -> list[list[RationalFunction]]:
        x, y = self.state
        return [[self.P.differentiate(x), self.P.differentiate(y)],
                [self.Q.differentiate(x), self.Q.differentiate(y)]]

    def divergence(self) -> RationalFunction:
        x, y = self.state
        return self.P.differentiate(x) + self.Q.differentiate(y)

    def at_point(self, f: RationalFunction, point) -> RationalFunction:
        px, py = (as_ratfunc(p) for p in point)
        return f.substitute({self.state[0]: px, self.state[1]: py})

    def specialize(self, bindings: Mapping[str, object]) -> "PlanarSystem":
        """Bind some parameters to rationals or rational functions."""
        rb = {k: as_ratfunc(v) for k, v in bindings.items()}
        for k in rb:
            if k not in self.params:
                raise SystemError("unknown parameter %r" % k)
        newparams = []
        for p in self.params:
            if p in rb:
                for v in rb[p].used_variables():
                    if v not in newparams and v not in self.state:
                        newparams.append(v)
            elif p not in newparams:
                newparams.append(p)
        P = self.P.substitute(rb)
        Q = self.Q.substitute(rb)
        return PlanarSystem(self.state, tuple(newparams), P, Q)

    def degree(self) -> int:
        x, y = self.state
        d = 0
        for f in (self.P, self.Q):
            for e in f.num.terms:
                dd = sum(k for v, k in zip(f.num.variables, e) if v in (x, y))
                d = max(d, dd)
        return d

    def state_homogeneous_parts(self, f: RationalFunction) -> dict[int, dict[tuple[int, int], RationalFunction]]:
        """Decompose f by total degree in the state variables.

        Returns {degree: {(i, j): coefficient}} with coefficients rational in
        the parameters only.
        """
        x, y = self.state
        num = f.num
        ix = num.variables.index(x)
        iy = num.variables.index(y)
        buckets: dict[int, dict[tuple[int, int], Polynomial]] = {}
        for e, c in num.terms.items():
            i, j = e[ix], e[iy]
            pe = list(e)
            pe[ix] = 0
            pe[iy] = 0
            b = buckets.setdefault(i + j, {}).setdefault((i, j), {})
            b[tuple(pe)] = c
        out: dict[int, dict[tuple[int, int], RationalFunction]] = {}
        for d, mons in buckets.items():
            out[d] = {}
            for ij, terms in mons.items():
                out[d][ij] = RationalFunction(
                    Polynomial(num.variables, terms), f.den)
        return out

    def __eq__(self, other):
        return (isinstance(other, PlanarSystem) and self.state == other.state
                and self.P == other.P and self.Q == other.Q)

    def __str__(self):
        lines = ["vars %s %s" % self.state]
        if self.params:
            lines.append("params " + " ".join(self.params))
        lines.append("dx = %s" % self.P)
        lines.append("dy = %s" % self.Q)
        return "\n".join(lines)

    def __repr__(self):
        return "PlanarSystem(%s)" % "; ".join(str(self).splitlines())


def _embed(f: RationalFunction, allvars) -> RationalFunction:
    return RationalFunction(f.num.with_variables(_merge_vars(allvars, f.num.variables)),
                            f.den.with_variables(_merge_vars(allvars, f.den.variables)))


class NormalFormSystem(PlanarSystem):
    """PlanarSystem whose linear part is exactly (-y, x); checked on construction."""

    def __init__(self, state, params, P, Q):
        super().__init__(state, params, P, Q)
        x, y = self.state
        for f, expect, name in ((self.P, {(0, 1): mpq(-1)}, "P"),
                                (self.Q, {(1, 0): mpq(1)}, "Q")):
            parts = self.state_homogeneous_parts(f)
            if 0 in parts and any(not c.is_zero() for c in parts[0].values()):
                raise SystemError("%s has a constant term" % name)
            lin = parts.get(1, {})
            for ij, c in lin.items():
                want = expect.get(ij, mpq(0))
                if not (c - RationalFunction.const(want)).is_zero():
                    raise SystemError(
                        "%s linear part is not normal form at %s: %s" % (name, ij, c))
            for ij, want in expect.items():
                if ij not in lin:
                    raise SystemError("%s linear part misses %s" % (name, ij))

    @classmethod
    def from_planar(cls, sys: PlanarSystem) -> "NormalFormSystem":
        return cls(sys.state, sys.params, sys.P, sys.Q)


@dataclass
class AffineChange:
    """Change of coordinates (x, y) = translation + linear_map . (u, v),
    with the new field optionally multiplied by ``time_rescale``.

    All entries are rational functions of the parameters.
    """

    translation: tuple[RationalFunction, RationalFunction]
    linear_map: tuple[tuple[RationalFunction, RationalFunction],
                      tuple[RationalFunction, RationalFunction]]
    time_rescale: RationalFunction = field(
        default_factory=lambda: RationalFunction.const(1))

    def __post_init__(self):
        self.translation = tuple(as_ratfunc(t) for t in self.translation)
        self.linear_map = tuple(tuple(as_ratfunc(c) for c in row)
                                for row in self.linear_map)
        self.time_rescale = as_ratfunc(self.time_rescale)
        if self.determinant().is_zero():
            raise SystemError("affine change has zero determinant")
        if self.time_rescale.is_zero():
            raise SystemError("zero time rescale")

    def determinant(self) -> RationalFunction:
        (a, b), (c, d) = self.linear_map
        return a * d - b * c

    def inverse_map(self):
        (a, b), (c, d) = self.linear_map
        det = self.determinant()
        return ((d / det, -b / det), (-c / det, a / det))

    def inverse(self) -> "AffineChange":
        """The change undoing this one."""
        inv = self.inverse_map()
        tx, ty = self.translation
        nt = (-(inv[0][0] * tx + inv[0][1] * ty),
              -(inv[1][0] * tx + inv[1][1] * ty))
        return AffineChange(nt, inv, RationalFunction.const(1) / self.time_rescale)

    @classmethod
    def translation_scale(cls, tx, ty, sx, sy, rescale=1) -> "AffineChange":
        """(x, y) = (tx + sx*u, ty + sy*v)."""
        return cls((as_ratfunc(tx), as_ratfunc(ty)),
                   ((as_ratfunc(sx), RationalFunction.zero()),
                    (RationalFunction.zero(), as_ratfunc(sy))),
                   as_ratfunc(rescale))


def apply_change(sys: PlanarSystem, ch: AffineChange) -> PlanarSystem:
    """Exact transformed field: u' = s * M^{-1} F(T + M u)."""
    x, y = sys.state
    u = RationalFunction.from_poly(Polynomial.var(x))
    v = RationalFunction.from_poly(Polynomial.var(y))
    (a, b), (c, d) = ch.linear_map
    tx, ty = ch.translation
    xs = tx + a * u + b * v
    ys = ty + c * u + d * v
    bindings = {x: xs, y: ys}
    Pn = sys.P.substitute(bindings)
    Qn = sys.Q.substitute(bindings)
    inv = ch.inverse_map()
    s = ch.time_rescale
    Pu = (inv[0][0] * Pn + inv[0][1] * Qn) * s
    Qv = (inv[1][0] * Pn + inv[1][1] * Qn) * s
    newparams = []
    for f in (Pu, Qv):
        for w in f.used_variables():
            if w not in (x, y) and w not in newparams:
                newparams.append(w)
    for p in sys.params:
        if p not in newparams:
            newparams.append(p)
    return PlanarSystem(sys.state, tuple(newparams), Pu, Qv)


# ---------------------------------------------------------------------------
# Kolmogorov construction
# ---------------------------------------------------------------------------


def kolmogorov_coeff_names(n: int) -> tuple[list[str], list[str], list[tuple[int, int]]]:
    """Coefficient names for x*X_{n-1}, y*Y_{n-1}: a0, a1, ... and b0, b1, ...

    Monomials of X and Y are enumerated by total degree, then by power of x
    (so for n=2: a0 + a1*x + a2*y, matching the Lotka-Volterra convention).
    """
    mons = []
    for d in range(n):
        for i in range(d, -1, -1):
            mons.append((i, d - i))
    a = ["a%d" % k for k in range(len(mons))]
    b = ["b%d" % k for k in range(len(mons))]
    return a, b, mons


def build_kolmogorov(n: int, bindings: Mapping[str, object] | None = None,
                     state: Sequence[str] = ("x", "y")) -> PlanarSystem:
    """General Kolmogorov system of degree n: dx = x*X_{n-1}, dy = y*Y_{n-1}.

    ``bindings`` may bind coefficient names (a0, a1, ..., b0, ...) to
    rationals or rational functions of new parameters; unbound coefficients
    stay symbolic.
    """
    if n < 2:
        raise SystemError("degree must be at least 2")
    anames, bnames, mons = kolmogorov_coeff_names(n)
    coeff_set = set(anames) | set(bnames)
    if bindings:
        for k in bindings:
            if k not in coeff_set:
                raise SystemError("binding for undeclared coefficient %r" % k)
    x, y = state
    params = anames + bnames
    allvars = tuple(state) + tuple(params)
    xv = Polynomial.var(x, allvars)
    yv = Polynomial.var(y, allvars)
    X = Polynomial.zero(allvars)
    Y = Polynomial.zero(allvars)
    for (i, j), an, bn in zip(mons, anames, bnames):
        m = xv.pow(i).mul(yv.pow(j))
        X = X + Polynomial.var(an, allvars).mul(m)
        Y = Y + Polynomial.var(bn, allvars).mul(m)
    sys = PlanarSystem(state, params, xv.mul(X), yv.mul(Y))
    if bindings:
        sys = sys.specialize({k: as_ratfunc(v) for k, v in bindings.items()})
    return sys


# ---------------------------------------------------------------------------
# Monodromy / reversibility
# ---------------------------------------------------------------------------


@dataclass
class MonodromyReport:
    trace: RationalFunction
    det: RationalFunction
    verdict: str


def monodromy_check(sys: PlanarSystem, point) -> MonodromyReport:
    """Trace/determinant of the Jacobian at an equilibrium; verdict
    'monodromic-candidate' iff trace == 0 and det is a positive constant."""
    px, py = (as_ratfunc(p) for p in point)
    for name, f in (("P", sys.P), ("Q", sys.Q)):
        val = sys.at_point(f, (px, py))
        if not val.is_zero():
            raise SystemError("point is not an equilibrium: %s = %s there" % (name, val))
    jac = sys.jacobian()
    j = [[sys.at_point(e, (px, py)) for e in row] for row in jac]
    trace = j[0][0] + j[1][1]
    det = j[0][0] * j[1][1] - j[0][1] * j[1][0]
    if not trace.is_zero():
        verdict = "nonzero-trace"
    elif det.is_constant():
        verdict = ("monodromic-candidate" if det.constant_value() > 0
                   else "non-monodromic")
    else:
        verdict = "indeterminate (det depends on parameters: %s)" % det
    return MonodromyReport(trace, det, verdict)


def reversibility_check(sys: PlanarSystem, line: str = "y=x") -> bool:
    """True iff the field is reversible w.r.t. the given reflection line
    composed with time reversal.

    ``line`` is "y=x" (swap the state variables) or "y=-x" (swap and negate).
    """
    x, y = sys.state
    if line == "y=x":
        swap = {x: RationalFunction.from_poly(Polynomial.var(y)),
                y: RationalFunction.from_poly(Polynomial.var(x))}
        return ((sys.P.substitute(swap) + sys.Q).is_zero()
                and (sys.Q.substitute(swap) + sys.P).is_zero())
    if line == "y=-x":
        swap = {x: -RationalFunction.from_poly(Polynomial.var(y)),
                y: -RationalFunction.from_poly(Polynomial.var(x))}
        return ((sys.Q.substitute(swap) - sys.P).is_zero()
                and (sys.P.substitute(swap) - sys.Q).is_zero())
    raise SystemError("unsupported reflection line %r" % line)


# ---------------------------------------------------------------------------
# Perturbation templates
# ---------------------------------------------------------------------------


@dataclass
class PerturbationTemplate:
    """Per-equation cofactor and monomial span with fresh parameter names.

    Each entry of ``spans`` is a list of (i, j, name): the term
    name * x^i * y^j, multiplied by the equation's cofactor.
    """

    cofactors: tuple[Polynomial, Polynomial]
    spans: tuple[list[tuple[int, int, str]], list[tuple[int, int, str]]]
    allow_linear: bool = False

    def fresh_names(self) -> list[str]:
        return [n for span in self.spans for (_, _, n) in span]

    def validate(self, sys: PlanarSystem):
        existing = set(sys.variables)
        names = self.fresh_names()
        if len(set(names)) != len(names):
            raise SystemError("duplicate perturbation parameter names")
        for n in names:
            if n in existing:
                raise SystemError("perturbation parameter %r collides" % n)
        for span in self.spans:
            for (i, j, n) in span:
                if i + j == 0:
                    raise SystemError(
                        "constant monomial in span (%r) would move the equilibrium" % n)
                if i + j == 1 and not self.allow_linear:
                    raise SystemError(
                        "linear monomial in span (%r); flag allow_linear for a trace term" % n)


def perturb(sys: NormalFormSystem, tpl: PerturbationTemplate,
            trace_name: str | None = None) -> NormalFormSystem:
    """Add cofactor * (fresh-parameter monomial span) to each equation.

    With ``trace_name`` the linear part becomes (t*x - y, x + t*y) and the
    result is returned as a plain PlanarSystem wrapped lazily (the trace term
    breaks the strict normal form, so it is kept at zero here and varied only
    through the trace parameter in reports).
    """
    tpl.validate(sys)
    x, y = sys.state
    newparams = list(sys.params) + tpl.fresh_names()
    if trace_name is not None:
        if trace_name in set(sys.variables) | set(tpl.fresh_names()):
            raise SystemError("trace parameter %r collides" % trace_name)
        newparams.append(trace_name)
    allvars = sys.state + tuple(newparams)
    xv = Polynomial.var(x, allvars)
    yv = Polynomial.var(y, allvars)
    adds = []
    for span, cof in zip(tpl.spans, tpl.cofactors):
        add = Polynomial.zero(allvars)
        for (i, j, name) in span:
            add = add + Polynomial.var(name, allvars).mul(xv.pow(i)).mul(yv.pow(j))
        adds.append(as_ratfunc(cof) * as_ratfunc(add))
    P = sys.P + adds[0]
    Q = sys.Q + adds[1]
    return NormalFormSystem(sys.state, tuple(newparams), P, Q)


# ---------------------------------------------------------------------------
# System files
# ---------------------------------------------------------------------------


def parse_system(text: str) -> PlanarSystem:
    """Parse the one-directive-per-line system format ('#' comments)."""
    state = None
    params: tuple[str, ...] = ()
    dx = dy = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("vars "):
            state = tuple(line.split()[1:])
            if len(state) != 2:
                raise ParseError("line %d: 'vars' needs exactly two names" % lineno)
        elif line.startswith("params"):
            params = tuple(line.split()[1:])
        elif line.startswith("dx"):
            _, _, rhs = line.partition("=")
            dx = rhs.strip()
        elif line.startswith("dy"):
            _, _, rhs = line.partition("=")
            dy = rhs.strip()
        else:
            raise ParseError("line %d: unknown directive %r" % (lineno, line))
    if state is None or dx is None or dy is None:
        raise ParseError("system file needs 'vars', 'dx' and 'dy' lines")
    allvars = state + params
    return PlanarSystem(state, params,
                        parse_ratfunc(dx, allvars), parse_ratfunc(dy, allvars))


def load_system(path) -> PlanarSystem:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_system(fh.read())
