"""Certified zero-existence and nonsingularity.

Everything here is exact: boxes have rational endpoints, enclosures come
from rational interval arithmetic, and every certificate is checkable by
re-evaluating the recorded enclosures.  Failure to certify is the
first-class value ``Indeterminate`` — never a claim of nonexistence.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from gmpy2 import mpq

from .intervals import RationalInterval, interval_eval
from .parsing import ParseError
from .poly import Polynomial, RationalFunction, as_ratfunc, rational

__all__ = [
    "Box", "Indeterminate", "PMCertificate", "GershgorinCertificate",
    "RootCertificate", "pm_certify", "gershgorin_nonsingular",
    "certified_nonvanishing", "certified_simple_root_1d", "parse_box",
]


def _q(x) -> str:
    f = Fraction(int(x.numerator), int(x.denominator)) if isinstance(x, mpq) \
        else Fraction(str(x))
    return "%d/%d" % (f.numerator, f.denominator)


def _iv_json(iv: RationalInterval) -> list[str]:
    return [_q(iv.lo), _q(iv.hi)]


@dataclass(frozen=True)
class Indeterminate:
    """Certification did not succeed within budget; not a nonexistence claim."""

    reason: str = ""

    def __bool__(self):
        return False


class Box:
    """Axis-aligned box: one rational interval per variable."""

    def __init__(self, intervals: Mapping[str, RationalInterval]):
        if not intervals:
            raise ValueError("empty box")
        self.intervals: dict[str, RationalInterval] = dict(intervals)

    @classmethod
    def around(cls, center: Mapping[str, object], h) -> "Box":
        """Box of half-width h in every variable around a rational point."""
        h = rational(h)
        return cls({v: RationalInterval(rational(c) - h, rational(c) + h)
                    for v, c in center.items()})

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(self.intervals)

    def center(self) -> dict[str, mpq]:
        return {v: iv.midpoint() for v, iv in self.intervals.items()}

    def half_widths(self) -> dict[str, mpq]:
        return {v: iv.width() / 2 for v, iv in self.intervals.items()}

    def face(self, var: str, side: int) -> "Box":
        """The sub-box with ``var`` pinned to its lower (-1) or upper (+1)
        endpoint."""
        iv = self.intervals[var]
        pin = iv.lo if side < 0 else iv.hi
        out = dict(self.intervals)
        out[var] = RationalInterval(pin, pin)
        return Box(out)

    def split_longest(self) -> tuple["Box", "Box"]:
        """Bisect along the variable with the widest interval (ties: first
        in variable order), leaving pinned variables untouched."""
        var = max(self.intervals, key=lambda v: self.intervals[v].width())
        a, b = self.intervals[var].split()
        la, lb = dict(self.intervals), dict(self.intervals)
        la[var], lb[var] = a, b
        return Box(la), Box(lb)

    def max_width(self) -> mpq:
        return max(iv.width() for iv in self.intervals.values())

    def contains_point(self, point: Mapping[str, object]) -> bool:
        return all(iv.contains(rational(point[v]))
                   for v, iv in self.intervals.items())

    def to_json(self) -> dict:
        return {v: _iv_json(iv) for v, iv in self.intervals.items()}

    def __repr__(self):
        return "Box(%s)" % ", ".join("%s=%r" % kv
                                     for kv in self.intervals.items())


def parse_box(text: str) -> Box:
    """Parse 'a=[-1/10,1/10] b=[0,1]' (space-, semicolon- or newline-
    separated assignments) into a Box."""
    intervals: dict[str, RationalInterval] = {}
    for chunk in text.replace(";", " ").replace("\n", " ").split():
        if "=" not in chunk:
            raise ParseError("expected 'var=[lo,hi]', got %r" % chunk)
        var, _, rng = chunk.partition("=")
        rng = rng.strip()
        if not (rng.startswith("[") and rng.endswith("]")):
            raise ParseError("expected '[lo,hi]' in %r" % chunk)
        parts = rng[1:-1].split(",")
        if len(parts) != 2:
            raise ParseError("expected two endpoints in %r" % chunk)
        try:
            intervals[var.strip()] = RationalInterval(rational(parts[0]),
                                                      rational(parts[1]))
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError("bad interval %r: %s" % (chunk, exc))
    if not intervals:
        raise ParseError("empty box specification")
    return Box(intervals)


# ---------------------------------------------------------------------------
# Enclosures with subdivision
# ---------------------------------------------------------------------------

def _check_denominator(f: RationalFunction, box: Box) -> None:
    if f.den.is_constant():
        return
    if not _sign_on_box(f.den, box, 6):
        raise ZeroDivisionError(
            "denominator enclosure contains zero on the box")


def _eval_rf(f: RationalFunction, box: Box) -> RationalInterval:
    den = interval_eval(f.den, box.intervals)
    if den.contains_zero():
        raise ZeroDivisionError("denominator enclosure contains zero")
    return interval_eval(f.num, box.intervals) / den


def _sign_on_box(f, box: Box, max_depth: int):
    """(sign, hull enclosure) if every leaf of a breadth-first longest-edge
    subdivision has the same strict sign; None otherwise."""
    f = as_ratfunc(f)
    queue = [(box, 0)]
    sign = None
    hull = None
    while queue:
        b, depth = queue.pop(0)
        enc = _eval_rf(f, b)
        hull = enc if hull is None else hull.hull(enc)
        s = enc.sign()
        if s == 0:
            if depth >= max_depth or b.max_width() == 0:
                return None
            lo, hi = b.split_longest()
            queue.append((lo, depth + 1))
            queue.append((hi, depth + 1))
            continue
        if sign is None:
            sign = s
        elif sign != s:
            return None
    return (sign, hull)


def _certify_weak_sign(f, box: Box, sign: int, max_depth: int):
    """Hull enclosure if f*sign >= 0 certifiably holds on the whole box
    (leaves straddling zero are subdivided up to max_depth); None otherwise.

    Weak inequalities suffice for the Poincaré–Miranda conclusion; strictness
    of the final hull is reported separately.
    """
    f = as_ratfunc(f)
    queue = [(box, 0)]
    hull = None
    while queue:
        b, depth = queue.pop(0)
        enc = _eval_rf(f, b)
        hull = enc if hull is None else hull.hull(enc)
        lo, hi = enc.lo * sign, enc.hi * sign
        if min(lo, hi) >= 0:
            continue
        if max(lo, hi) < 0:
            return None  # certifiably the wrong sign somewhere
        if depth >= max_depth or b.max_width() == 0:
            return None
        a, c = b.split_longest()
        queue.append((a, depth + 1))
        queue.append((c, depth + 1))
    return hull


# ---------------------------------------------------------------------------
# Poincaré–Miranda
# ---------------------------------------------------------------------------

@dataclass
class PMCertificate:
    """For each function: enclosures on the two faces of its assigned
    variable with opposite signs (assignment and orientation recorded).
    If the system was preconditioned, the exact rational matrix applied is
    recorded; it is checked nonsingular, so the original system has the same
    zero."""

    box: Box
    faces: list[dict]            # per function: variable, enclosures, flip
    max_depth: int
    preconditioner: list[list[mpq]] | None = None

    def to_json(self) -> dict:
        out = {"kind": "poincare-miranda",
               "box": self.box.to_json(),
               "max_depth": self.max_depth,
               "faces": self.faces}
        if self.preconditioner is not None:
            out["preconditioner"] = [[_q(e) for e in row]
                                     for row in self.preconditioner]
        return out

    def to_json_text(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def _face_options(f, box: Box, var: str, max_depth: int):
    """The orientations in which f satisfies the two face conditions for
    ``var``: list of (flip, lower enclosure, upper enclosure)."""
    lo_face, hi_face = box.face(var, -1), box.face(var, +1)
    out = []
    for flip, want_lo in ((False, -1), (True, +1)):
        enc_lo = _certify_weak_sign(f, lo_face, want_lo, max_depth)
        if enc_lo is None:
            continue
        enc_hi = _certify_weak_sign(f, hi_face, -want_lo, max_depth)
        if enc_hi is None:
            continue
        out.append((flip, enc_lo, enc_hi))
    return out


def _precondition(fs: list[RationalFunction], box: Box
                  ) -> tuple[list[RationalFunction], list[list[mpq]]]:
    """Replace the system by J(center)^{-1} * f, with the exact rational
    Jacobian at the box center.  The matrix is recorded in the certificate;
    its invertibility (checked during the exact inverse) guarantees the
    preconditioned system has the same zero set."""
    from .linalg import mpq_inverse
    center = box.center()
    variables = box.variables
    jac = [[f.differentiate(v).evaluate(center) for v in variables]
           for f in fs]
    inv = mpq_inverse(jac)
    out = []
    for row in inv:
        acc = RationalFunction.zero()
        for c, f in zip(row, fs):
            acc = acc + f.scale(c)
        out.append(acc.reduced())
    return out, inv


def pm_certify(fs: Sequence, box: Box, max_depth: int = 12,
               precondition: bool = False):
    """Poincaré–Miranda existence certificate: under some assignment of
    functions to box variables, f_i is nonpositive on the lower face of its
    variable and nonnegative on the upper face (or the reverse).  The
    assignment permutation and per-function sign flips are recorded; the
    face conclusions hold with weak inequalities, which is enough for the
    existence statement, and strictness of each enclosure is reported.

    With ``precondition`` the system is first multiplied by the exact
    rational inverse Jacobian at the box center (recorded), which aligns
    each function with one coordinate direction near a simple zero.

    Faces are subdivided adaptively by longest-edge bisection,
    breadth-first, up to ``max_depth``.  Returns a PMCertificate or
    Indeterminate.  A denominator whose enclosure contains zero on the box
    is an error (ZeroDivisionError).
    """
    fs = [as_ratfunc(f) for f in fs]
    variables = box.variables
    if len(fs) != len(variables):
        raise ValueError("need as many functions (%d) as variables (%d)"
                         % (len(fs), len(variables)))
    for f in fs:
        _check_denominator(f, box)
    matrix = None
    if precondition:
        try:
            fs, matrix = _precondition(fs, box)
        except (ValueError, ZeroDivisionError) as exc:
            return Indeterminate("preconditioning failed: %s" % exc)
    options: list[dict[str, tuple]] = []
    for f in fs:
        opts = {}
        for var in variables:
            cands = _face_options(f, box, var, max_depth)
            if cands:
                opts[var] = cands[0]
        if not opts:
            return Indeterminate(
                "a function has no certifiable face pair in any direction")
        options.append(opts)

    # perfect matching of functions to variables (n is small)
    assignment: list[str | None] = [None] * len(fs)

    def match(i: int, used: set) -> bool:
        if i == len(fs):
            return True
        for var in options[i]:
            if var not in used:
                assignment[i] = var
                if match(i + 1, used | {var}):
                    return True
        assignment[i] = None
        return False

    if not match(0, set()):
        return Indeterminate("no assignment of functions to box variables "
                             "satisfies the face sign conditions")
    faces = []
    for i, (f, var) in enumerate(zip(fs, assignment)):
        flip, enc_lo, enc_hi = options[i][var]
        faces.append({"function": i,
                      "variable": var,
                      "flip": flip,
                      "strict": (enc_lo.hi < 0 or enc_lo.lo > 0)
                      and (enc_hi.hi < 0 or enc_hi.lo > 0),
                      "lower_enclosure": _iv_json(enc_lo),
                      "upper_enclosure": _iv_json(enc_hi)})
    return PMCertificate(box, faces, max_depth, matrix)


# ---------------------------------------------------------------------------
# Gershgorin
# ---------------------------------------------------------------------------

@dataclass
class GershgorinCertificate:
    """Every eigenvalue enclosure of the interval matrix excludes zero:
    each diagonal magnitude lower bound strictly exceeds the row's
    off-diagonal magnitude sum."""

    entries: list[list[RationalInterval]]
    centers: list[RationalInterval] = field(default_factory=list)
    radii: list[mpq] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"kind": "gershgorin",
                "entries": [[_iv_json(e) for e in row]
                            for row in self.entries],
                "centers": [_iv_json(c) for c in self.centers],
                "radii": [_q(r) for r in self.radii]}

    def to_json_text(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def _coerce_iv(x) -> RationalInterval:
    if isinstance(x, RationalInterval):
        return x
    return RationalInterval(rational(x))


def gershgorin_nonsingular(matrix: Sequence[Sequence]):
    """Certificate that every matrix in the interval matrix is nonsingular,
    or Indeterminate."""
    m = [[_coerce_iv(e) for e in row] for row in matrix]
    n = len(m)
    if any(len(row) != n for row in m):
        raise ValueError("matrix must be square")
    centers, radii = [], []
    for i, row in enumerate(m):
        radius = sum((e.mag() for j, e in enumerate(row) if j != i),
                     mpq(0))
        diag = row[i]
        if diag.mig() <= radius:
            return Indeterminate(
                "row %d: disc around the diagonal reaches zero" % i)
        centers.append(diag)
        radii.append(radius)
    return GershgorinCertificate(m, centers, radii)


# ---------------------------------------------------------------------------
# Nonvanishing and 1-D simple roots
# ---------------------------------------------------------------------------

def certified_nonvanishing(f, box: Box, max_depth: int = 12) -> bool:
    """True iff the enclosure of f (with subdivision budget) excludes zero
    everywhere on the box; budget exhaustion gives False, not an error."""
    f = as_ratfunc(f)
    _check_denominator(f, box)
    return _sign_on_box(f, box, max_depth) is not None


@dataclass
class RootCertificate:
    """Opposite strict signs at the interval endpoints plus a certified
    nonvanishing derivative: exactly one simple root inside."""

    variable: str
    interval: RationalInterval
    value_lo: RationalInterval
    value_hi: RationalInterval
    derivative_enclosure: RationalInterval

    def to_json(self) -> dict:
        return {"kind": "simple-root-1d",
                "variable": self.variable,
                "interval": _iv_json(self.interval),
                "value_at_lo": _iv_json(self.value_lo),
                "value_at_hi": _iv_json(self.value_hi),
                "derivative_enclosure": _iv_json(self.derivative_enclosure)}

    def to_json_text(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def certified_simple_root_1d(f, interval: RationalInterval,
                             var: str | None = None, max_depth: int = 12):
    """Certificate that the univariate function f has exactly one root in
    the interval: opposite signs at the endpoints (exact rational
    evaluation) and derivative certified nonvanishing on the interval."""
    f = as_ratfunc(f)
    used = f.used_variables()
    if var is None:
        if len(used) != 1:
            raise ValueError("function is not univariate: %s" % (used,))
        var = used[0]
    elif any(u != var for u in used):
        raise ValueError("function uses variables other than %r" % var)
    lo_box = Box({var: RationalInterval(interval.lo, interval.lo)})
    hi_box = Box({var: RationalInterval(interval.hi, interval.hi)})
    try:
        vlo = _eval_rf(f, lo_box)
        vhi = _eval_rf(f, hi_box)
    except ZeroDivisionError:
        return Indeterminate("denominator vanishes at an endpoint")
    if vlo.sign() == 0 or vhi.sign() == 0 or vlo.sign() == vhi.sign():
        return Indeterminate("no strict sign change at the endpoints")
    df = f.differentiate(var)
    full = Box({var: interval})
    try:
        res = _sign_on_box(df, full, max_depth)
    except ZeroDivisionError:
        return Indeterminate("derivative denominator enclosure contains zero")
    if res is None:
        return Indeterminate("derivative sign unresolved on the interval")
    _, enc = res
    return RootCertificate(var, interval, vlo, vhi, enc)


# ---------------------------------------------------------------------------
# Exact recentering / normalization helpers
# ---------------------------------------------------------------------------

def recenter(fs: Sequence, point: Mapping[str, object]
             ) -> list[RationalFunction]:
    """Exact rational affine change of coordinates moving ``point`` to the
    origin: f(x) -> f(x + point)."""
    out = []
    for f in fs:
        f = as_ratfunc(f)
        binds = {v: as_ratfunc(Polynomial.var(v))
                 + RationalFunction.const(rational(c))
                 for v, c in point.items()}
        out.append(f.substitute(binds).reduced())
    return out


def normalize_at_origin(fs: Sequence) -> list[RationalFunction]:
    """Divide each function by |f(0)| when f(0) != 0, conditioning the
    enclosures; certificate existence is invariant under this rescaling."""
    out = []
    for f in fs:
        f = as_ratfunc(f)
        zero = {v: mpq(0) for v in f.used_variables()}
        try:
            c = f.evaluate(zero)
        except ZeroDivisionError:
            c = mpq(0)
        out.append(f.scale(1 / abs(c)) if c != 0 else f)
    return out
