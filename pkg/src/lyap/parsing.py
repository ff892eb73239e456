"""Expression and file parsers.

Grammar (whitespace insignificant, '#' starts a comment in files):

    expr     := term (('+'|'-') term)*
    term     := factor (('*'|'/') factor)*
    factor   := '-' factor | atom ('^' nonneg-int)?
    atom     := rational | ident | '(' expr ')'
    rational := int ('/' int)?

Unary minus binds more loosely than '^', so -x^2 means -(x^2).

'/' between factors builds a rational function; contexts that require a
polynomial reject non-constant denominators.
"""

from __future__ import annotations

import re
from typing import Sequence

from .poly import Polynomial, RationalFunction, rational

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|([()+\-*/^]))")


class ParseError(ValueError):
    pass


class _Tokens:
    def __init__(self, text: str):
        self.text = text
        self.toks = []
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos and not text[pos:].strip():
                break
            if not m:
                raise ParseError("unexpected character %r at %d" % (text[pos], pos))
            if m.end() == pos:
                raise ParseError("unexpected character %r at %d" % (text[pos], pos))
            if m.group(1):
                self.toks.append(("int", m.group(1)))
            elif m.group(2):
                self.toks.append(("ident", m.group(2)))
            elif m.group(3):
                self.toks.append(("op", m.group(3)))
            pos = m.end()
        if text[pos:].strip():
            raise ParseError("unexpected character %r at %d" % (text[pos:].strip()[0], pos))
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def next(self):
        t = self.peek()
        self.i += 1
        return t

    def expect_op(self, op):
        kind, val = self.next()
        if kind != "op" or val != op:
            raise ParseError("expected %r, got %r" % (op, val))


def parse_ratfunc(text: str, variables: Sequence[str]) -> RationalFunction:
    """Parse an expression into a RationalFunction over the declared variables."""
    variables = tuple(variables)
    toks = _Tokens(text)
    val = _expr(toks, variables)
    if toks.peek()[0] is not None:
        raise ParseError("trailing input %r in %r" % (toks.peek()[1], text))
    return RationalFunction(val.num.with_variables(variables),
                            val.den.with_variables(variables))


def parse_poly(text: str, variables: Sequence[str]) -> Polynomial:
    """Parse an expression that must reduce to a polynomial."""
    r = parse_ratfunc(text, variables)
    if not r.den.is_constant():
        raise ParseError("expression is not a polynomial: %r" % text)
    return r.num.scale(1 / r.den.constant_value())


def _expr(toks, variables) -> RationalFunction:
    val = _term(toks, variables)
    while True:
        kind, op = toks.peek()
        if kind == "op" and op in "+-":
            toks.next()
            rhs = _term(toks, variables)
            val = val + rhs if op == "+" else val - rhs
        else:
            return val


def _term(toks, variables) -> RationalFunction:
    val = _factor(toks, variables)
    while True:
        kind, op = toks.peek()
        if kind == "op" and op in "*/":
            toks.next()
            rhs = _factor(toks, variables)
            val = val * rhs if op == "*" else val / rhs
        else:
            return val


def _factor(toks, variables) -> RationalFunction:
    kind, op = toks.peek()
    if kind == "op" and op == "-":
        toks.next()
        return -_factor(toks, variables)
    val = _atom(toks, variables)
    kind, op = toks.peek()
    if kind == "op" and op == "^":
        toks.next()
        k, v = toks.next()
        if k != "int":
            raise ParseError("exponent must be a nonnegative integer, got %r" % (v,))
        val = val.pow(int(v))
    return val


def _atom(toks, variables) -> RationalFunction:
    kind, val = toks.next()
    if kind == "int":
        return RationalFunction.const(rational(val))
    if kind == "ident":
        if val not in variables:
            raise ParseError("unknown identifier %r (declared: %s)" %
                             (val, ", ".join(variables)))
        return RationalFunction.from_poly(Polynomial.var(val, variables))
    if kind == "op" and val == "(":
        inner = _expr(toks, variables)
        toks.expect_op(")")
        return inner
    raise ParseError("unexpected token %r" % (val,))
