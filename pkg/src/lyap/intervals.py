"""Exact rational interval arithmetic with the containment property.

Every operation returns an enclosure of the exact image; endpoints are mpq,
so there is no outward rounding and enclosures of point inputs are exact.
"""

from __future__ import annotations

from typing import Mapping

from gmpy2 import mpq

from .poly import Polynomial, RationalFunction, rational


class RationalInterval:
    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi=None):
        lo = rational(lo)
        hi = lo if hi is None else rational(hi)
        if lo > hi:
            raise ValueError("empty interval [%s, %s]" % (lo, hi))
        self.lo = lo
        self.hi = hi

    @classmethod
    def point(cls, x) -> "RationalInterval":
        return cls(x)

    def width(self) -> mpq:
        return self.hi - self.lo

    def midpoint(self) -> mpq:
        return (self.lo + self.hi) / 2

    def contains(self, x) -> bool:
        x = rational(x)
        return self.lo <= x <= self.hi

    def contains_zero(self) -> bool:
        return self.lo <= 0 <= self.hi

    def contains_interval(self, other: "RationalInterval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def sign(self) -> int:
        """1 if strictly positive, -1 if strictly negative, 0 otherwise."""
        if self.lo > 0:
            return 1
        if self.hi < 0:
            return -1
        return 0

    def mag(self) -> mpq:
        """Upper bound of |x| over the interval."""
        return max(abs(self.lo), abs(self.hi))

    def mig(self) -> mpq:
        """Lower bound of |x| over the interval (0 if it straddles 0)."""
        if self.contains_zero():
            return mpq(0)
        return min(abs(self.lo), abs(self.hi))

    def __add__(self, other):
        other = _coerce(other)
        return RationalInterval(self.lo + other.lo, self.hi + other.hi)

    __radd__ = __add__

    def __neg__(self):
        return RationalInterval(-self.hi, -self.lo)

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return (-self) + _coerce(other)

    def __mul__(self, other):
        other = _coerce(other)
        cands = (self.lo * other.lo, self.lo * other.hi,
                 self.hi * other.lo, self.hi * other.hi)
        return RationalInterval(min(cands), max(cands))

    __rmul__ = __mul__

    def inverse(self) -> "RationalInterval":
        if self.contains_zero():
            raise ZeroDivisionError("interval straddles zero")
        return RationalInterval(1 / self.hi, 1 / self.lo)

    def __truediv__(self, other):
        return self * _coerce(other).inverse()

    def __rtruediv__(self, other):
        return _coerce(other) * self.inverse()

    def pow(self, k: int) -> "RationalInterval":
        """Tight power: even powers of straddling intervals start at 0."""
        if k < 0:
            return self.inverse().pow(-k)
        if k == 0:
            return RationalInterval(1)
        if k % 2 == 1:
            return RationalInterval(self.lo ** k, self.hi ** k)
        m = self.mag() ** k
        if self.contains_zero():
            return RationalInterval(0, m)
        return RationalInterval(self.mig() ** k, m)

    def __pow__(self, k):
        return self.pow(k)

    def hull(self, other: "RationalInterval") -> "RationalInterval":
        return RationalInterval(min(self.lo, other.lo), max(self.hi, other.hi))

    def intersects(self, other: "RationalInterval") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def split(self) -> tuple["RationalInterval", "RationalInterval"]:
        m = self.midpoint()
        return RationalInterval(self.lo, m), RationalInterval(m, self.hi)

    def __eq__(self, other):
        return (isinstance(other, RationalInterval)
                and self.lo == other.lo and self.hi == other.hi)

    def __repr__(self):
        return "[%s, %s]" % (self.lo, self.hi)


def _coerce(x) -> RationalInterval:
    if isinstance(x, RationalInterval):
        return x
    return RationalInterval(rational(x))


def interval_eval(p: Polynomial, box: Mapping[str, RationalInterval]) -> RationalInterval:
    """Enclosure of a polynomial's range over a box (recursive Horner scheme)."""
    for v in p.used_variables():
        if v not in box:
            raise ValueError("unbound variable %r" % v)
    return _horner(p, dict(box))


def _horner(p: Polynomial, box) -> RationalInterval:
    used = p.used_variables()
    if not used:
        return RationalInterval(p.constant_value() if p.terms else 0)
    # Horner in the used variable of highest degree
    v = max(used, key=lambda u: p.degree_in(u))
    iv = _coerce(box[v])
    coeffs = p.as_univariate(v)
    degs = sorted(coeffs, reverse=True)
    acc = _horner(coeffs[degs[0]], box)
    prev = degs[0]
    for d in degs[1:]:
        acc = acc * iv.pow(prev - d) + _horner(coeffs[d], box)
        prev = d
    if prev > 0:
        acc = acc * iv.pow(prev)
    return acc


def interval_eval_rf(f: RationalFunction, box: Mapping[str, RationalInterval]) -> RationalInterval:
    """Enclosure of a rational function; requires the denominator enclosure
    to exclude zero."""
    den = interval_eval(f.den, box)
    if den.contains_zero():
        raise ZeroDivisionError("denominator enclosure contains zero")
    return interval_eval(f.num, box) / den
