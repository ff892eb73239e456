"""Center certification for the translated cubic Kolmogorov family.

Two certificate kinds are supported: Darboux integrating factors, verified
purely through the cofactor identity (the factor function V itself is never
constructed, so rational exponents cost nothing), and time-reversibility
across a reflection line.  The eight known center conditions of the cubic
family ship as presets together with their certificates.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .parsing import ParseError, parse_poly, parse_ratfunc
from .poly import Polynomial, RationalFunction, as_ratfunc
from .system import PlanarSystem, parse_system, reversibility_check


class NotInvariantError(ValueError):
    """Raised when a proposed curve is not invariant; carries the remainder."""

    def __init__(self, f, remainder):
        super().__init__("curve %s is not invariant (remainder %s)" % (f, remainder))
        self.factor = f
        self.remainder = remainder


@dataclass
class DarbouxCandidate:
    """Factors f_i with rational-function exponents alpha_i for
    V = prod f_i^alpha_i."""

    factors: list[tuple[Polynomial, RationalFunction]]

    @classmethod
    def parse(cls, text: str, variables: Sequence[str]) -> "DarbouxCandidate":
        """One factor per line: 'factor = <poly> ; exponent = <expr>'."""
        factors = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                fpart, epart = line.split(";", 1)
                _, _, ftxt = fpart.partition("=")
                _, _, etxt = epart.partition("=")
            except ValueError:
                raise ParseError("line %d: expected 'factor = ... ; exponent = ...'"
                                 % lineno)
            factors.append((parse_poly(ftxt.strip(), variables),
                            parse_ratfunc(etxt.strip(), variables)))
        if not factors:
            raise ParseError("empty Darboux candidate")
        return cls(factors)

    def __str__(self):
        return "\n".join("factor = %s ; exponent = %s" % (f, e)
                         for f, e in self.factors)


@dataclass
class CenterCondition:
    """Named parameter substitution defining a center family."""

    name: str
    rules: dict[str, RationalFunction]


def cofactor_of(sys: PlanarSystem, f: Polynomial) -> RationalFunction:
    """Cofactor K with P*f_x + Q*f_y = K*f; raises NotInvariantError
    (carrying the reduction remainder) if the curve is not invariant.

    K is rational in the parameters only (polynomial in the state).
    """
    if f.is_constant():
        raise ValueError("factor must be nonconstant")
    x, y = sys.state
    fe = f.with_variables(sys.variables) if set(f.used_variables()) <= set(sys.variables) else f
    r = sys.P * as_ratfunc(fe.differentiate(x)) + sys.Q * as_ratfunc(fe.differentiate(y))
    num, fa = r.num._aligned(fe)
    q, rem = poly_divmod(num, fa)
    if not rem.is_zero():
        raise NotInvariantError(f, RationalFunction(rem, r.den))
    K = RationalFunction(q, r.den)
    # invariant curves of a polynomial field have cofactor degree < deg(sys)
    ddeg = max(d for d in _state_degrees(sys, K) if True) if not K.is_zero() else 0
    assert ddeg <= max(sys.degree() - 1, 0), "cofactor degree bound violated"
    return K


def _state_degrees(sys: PlanarSystem, f: RationalFunction):
    x, y = sys.state
    vs = f.num.variables
    ix = vs.index(x) if x in vs else None
    iy = vs.index(y) if y in vs else None
    degs = [0]
    for e in f.num.terms:
        degs.append((e[ix] if ix is not None else 0)
                    + (e[iy] if iy is not None else 0))
    return degs


def poly_divmod(n: Polynomial, f: Polynomial) -> tuple[Polynomial, Polynomial]:
    """Multivariate division of n by the single divisor f (graded-lex leading
    terms): n = q*f + r with no term of r divisible by lt(f)."""
    n, f = n._aligned(f)
    q = Polynomial.zero(n.variables)
    r = Polynomial.zero(n.variables)
    le, lc = f.leading()
    work = n
    while not work.is_zero():
        we, wc = work.leading()
        if all(a >= b for a, b in zip(we, le)):
            me = tuple(a - b for a, b in zip(we, le))
            m = Polynomial(n.variables, {me: wc / lc})
            q = q + m
            work = work - m.mul(f)
        else:
            m = Polynomial(n.variables, {we: wc})
            r = r + m
            work = work - m
    return q, r


def darboux_check(sys: PlanarSystem, cand: DarbouxCandidate) -> bool:
    """True iff sum(alpha_i * K_i) + div(P, Q) == 0 symbolically, i.e.
    V = prod f_i^alpha_i is an integrating factor of the field."""
    total = sys.divergence()
    for f, alpha in cand.factors:
        K = cofactor_of(sys, f)
        al = alpha
        if set(al.used_variables()) <= set(sys.variables):
            from .system import _embed
            al = _embed(al, sys.variables)
        total = total + al * K
    return total.reduced().is_zero()


def specialize_center(family: PlanarSystem, cond: CenterCondition) -> PlanarSystem:
    return family.specialize(cond.rules) if cond.rules else family


# ---------------------------------------------------------------------------
# The translated cubic Kolmogorov family and its eight center presets
# ---------------------------------------------------------------------------

CUBIC_FAMILY_TEXT = """\
vars x y
params a1 a2 a3 b1 b2 b3
dx = -y*(a1*x+1)*(a2*x+a3*y+1)
dy = x*(b1*y+1)*(b2*x+b3*y+1)
"""


def translated_cubic_family() -> PlanarSystem:
    """Cubic Kolmogorov system translated so the positive equilibrium is the
    origin and the linear part is the standard rotation."""
    return parse_system(CUBIC_FAMILY_TEXT)


def _rf(text: str) -> RationalFunction:
    return parse_ratfunc(text, ("a1", "a2", "a3", "b1", "b2", "b3"))


CENTER_CONDITIONS: dict[str, CenterCondition] = {
    "C1": CenterCondition("C1", {"a2": _rf("0"), "b2": _rf("0")}),
    "C2": CenterCondition("C2", {"a2": _rf("0"), "b3": _rf("0")}),
    "C3": CenterCondition("C3", {"a3": _rf("0"), "b2": _rf("0")}),
    "C4": CenterCondition("C4", {"a3": _rf("0"), "b3": _rf("0")}),
    "C5": CenterCondition("C5", {"a2": _rf("b2"), "b3": _rf("a3")}),
    "C6": CenterCondition("C6", {"a3": _rf("b2"), "b1": _rf("a1"),
                                 "b3": _rf("a2")}),
    "C7": CenterCondition("C7", {"a3": _rf("-b2"), "b1": _rf("-a1"),
                                 "a2": _rf("-b3")}),
    "C8": CenterCondition("C8", {"a1": _rf("-(a3^2-b2^2)/b2"),
                                 "a2": _rf("-b2"),
                                 "b1": _rf("(a3^2-b2^2)/a3"),
                                 "b3": _rf("-a3")}),
}

# Certificates in the translated coordinates.  Exponent expressions may use
# the family parameters; constant prefactors of V are irrelevant to the
# cofactor identity and are omitted.
_C3_ALPHA = "-(a1*a2-a2^2+b1^2-b1*b3)/((b1-b3)*b1)"
_C3_BETA = "(a1*a2-a2^2-b1*b3+b3^2)/(b3*(b1-b3))"
_C3_GAMMA = "-(a1^2*a2-a1*a2^2-a1*b1*b3+a2*b1*b3)/(a1*b1*b3)"

CENTER_CERTIFICATES: dict[str, tuple[str, list[tuple[str, str]] | str]] = {
    "C1": ("darboux", [("b1*y+1", "-1"), ("a1*x+1", "-1"), ("b3*y+1", "-1")]),
    "C2": ("darboux", [("a1*x+1", "-1"), ("b1*y+1", "-1")]),
    "C3": ("darboux", [("b1*y+1", _C3_ALPHA), ("b3*y+1", _C3_BETA),
                       ("a1*x+1",
                        "(%s)+(%s)+(%s)" % (_C3_ALPHA, _C3_BETA, _C3_GAMMA))]),
    "C4": ("darboux", [("b1*y+1", "-1"), ("a1*x+1", "-1"), ("a2*x+1", "-1")]),
    "C5": ("darboux", [("b2*x+a3*y+1", "-1"), ("b1*y+1", "-1"),
                       ("a1*x+1", "-1")]),
    "C6": ("reversible", "y=x"),
    "C7": ("reversible", "y=-x"),
    "C8": ("darboux", [("a3*y+b2*x+1", "1"),
                       ("a3^2*y-b2^2*y+a3", "-1"),
                       ("a3^2*x-b2^2*x-b2", "-1"),
                       ("a3^4*y^2-a3^2*b2^2*x^2-a3^2*b2^2*y^2+b2^4*x^2-a3^2-b2^2",
                        "-1")]),
}


MONODROMIC_LV_TEXT = """\
# Quadratic Lotka-Volterra family with a trace-zero monodromic interior
# equilibrium, translated to the origin and rationally normalized.  The
# Jacobian there is [[a, b], [c, -a]] with b = -(a^2 + w^2)/c, so the
# determinant is w^2 > 0; coordinates (a x + b y)/w, x and time scaled by w
# give the standard rotation linear part, rational in (a, c, w).
vars x y
params a c w
dx = (a*x*(y + 1) - (1 - c*(w*x - a*y)/(a^2 + w^2))*(w*y + a*x))/w
dy = x*(y + 1)
"""


def monodromic_lv_family():
    """General monodromic quadratic Lotka-Volterra family in normal form;
    every Lyapunov constant of this family vanishes identically (the
    equilibrium is always a center)."""
    from .system import NormalFormSystem
    sys = parse_system(MONODROMIC_LV_TEXT)
    return NormalFormSystem(sys.state, sys.params, sys.P, sys.Q)


def verify_center(name: str) -> bool:
    """Specialize the cubic family by the named condition and verify its
    shipped certificate (Darboux or reversibility)."""
    fam = translated_cubic_family()
    sys = specialize_center(fam, CENTER_CONDITIONS[name])
    kind, data = CENTER_CERTIFICATES[name]
    if kind == "reversible":
        return reversibility_check(sys, data)
    cand = DarbouxCandidate([(parse_poly(f, sys.variables),
                              parse_ratfunc(e, sys.variables))
                             for f, e in data])
    return darboux_check(sys, cand)
