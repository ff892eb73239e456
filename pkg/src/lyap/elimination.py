"""Resultant elimination cascade over the Lyapunov constants.

The cascade eliminates parameters one at a time by pairwise resultants,
stripping known factors as they appear (integer content, monomial factors,
and a script-supplied candidate list — full multivariate factorization is
out of scope).  The linear factors that split off along the way define the
branches of the center variety; each branch is then solved by a recursive
triangularization and every reported solution is re-verified by exact
substitution into L_1..L_6.
"""

from __future__ import annotations

import json
import os
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from gmpy2 import mpq

from .intervals import RationalInterval
from .parsing import ParseError, parse_poly, parse_ratfunc
from .poly import (Polynomial, RationalFunction, as_ratfunc, gcd_poly,
                   resultant)
from .roots import isolate_real_roots, refine_root

__all__ = [
    "EliminationStep", "VarietyBranch", "CascadeResult", "eliminate_step",
    "run_cascade", "parse_script", "default_script", "solve_branch",
    "verify_solution", "same_variety", "symmetry_image", "CUBIC_SYMMETRY",
]


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("LYAP_THREADS", "1")))
    except ValueError:
        return 1


def _pmap(fn, items):
    n = _threads()
    if n <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))


# ---------------------------------------------------------------------------
# Factor stripping and single elimination steps
# ---------------------------------------------------------------------------

def _normalized(p: Polynomial, variables: Sequence[str]) -> Polynomial:
    """Primitive part over a fixed variable tuple, leading coefficient > 0."""
    if p.is_zero():
        return Polynomial.zero(variables)
    _, q = p.primitive()
    q = q.drop_unused().with_variables(variables)
    if q.leading()[1] < 0:
        q = q.scale(mpq(-1))
    return q


def strip_factors(raw: Polynomial, candidates: Sequence[Polynomial]
                  ) -> tuple[Polynomial, list[tuple[Polynomial, int]]]:
    """Divide out rational content, per-variable monomial factors, and each
    candidate factor while the division stays exact; return the stripped
    polynomial and the removed factors with multiplicities."""
    removed: list[tuple[Polynomial, int]] = []
    if raw.is_zero():
        return raw, removed
    _, work = raw.primitive()
    mc = work.monomial_content()
    if any(mc):
        for v, k in zip(work.variables, mc):
            if k:
                removed.append((Polynomial.var(v, work.variables), k))
        work = work.div_monomial(mc)
    for cand in candidates:
        c = cand.with_variables(work.variables) \
            if set(cand.used_variables()) <= set(work.variables) else cand
        mult = 0
        while not work.is_constant() and c.divides(work):
            work = work.exact_div(c)
            mult += 1
        if mult:
            removed.append((cand, mult))
    _, work = work.primitive()
    return work, removed


@dataclass
class EliminationStep:
    """One stage of the cascade: pairwise resultants against the first
    polynomial, each stripped of known factors.

    Invariant (tested): stripped * prod(removed^mult) equals the raw
    resultant up to a rational constant.  An identically-zero resultant is
    kept with ``identically_zero`` set — the caller must drop or branch on
    the shared component explicitly.
    """

    inputs: list[Polynomial]
    var: str
    outputs: list[tuple[Polynomial, list[tuple[Polynomial, int]]]]
    raw: list[Polynomial] = field(default_factory=list)

    @property
    def identically_zero(self) -> list[int]:
        return [i for i, (s, _) in enumerate(self.outputs) if s.is_zero()]

    def stripped(self) -> list[Polynomial]:
        return [s for s, _ in self.outputs if not s.is_zero()]

    def degrees(self) -> list[int]:
        return [s.total_degree() for s, _ in self.outputs]


def eliminate_step(polys: Sequence[Polynomial], var: str,
                   known_factors: Sequence[Polynomial] = ()) -> EliminationStep:
    """Eliminate ``var`` from the system by resultants of polys[0] with each
    of the others, stripping ``known_factors``."""
    polys = list(polys)
    if len(polys) < 2:
        raise ValueError("need at least two polynomials to eliminate")
    for p in polys:
        if p.degree_in(var) == 0:
            raise ValueError("input does not depend on %r: %s" % (var, p))
    base = polys[0]

    def one(q):
        return resultant(base, q, var)

    raws = _pmap(one, polys[1:])
    outputs = []
    for raw in raws:
        stripped, removed = strip_factors(raw, known_factors)
        outputs.append((stripped, removed))
    return EliminationStep(polys, var, outputs, raws)


# ---------------------------------------------------------------------------
# Script files
# ---------------------------------------------------------------------------

def parse_script(text: str, variables: Sequence[str]
                 ) -> list[tuple[str, list[Polynomial]]]:
    """Ordered stages, one per line: 'eliminate <var> strip <f>,<f>,...'
    (the strip clause may be omitted)."""
    stages = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split(None, 2)
        if len(parts) < 2 or parts[0] != "eliminate":
            raise ParseError("line %d: expected 'eliminate <var> "
                             "[strip <f>,...]'" % lineno)
        var = parts[1]
        if var not in variables:
            raise ParseError("line %d: unknown variable %r" % (lineno, var))
        cands = []
        if len(parts) == 3:
            head, _, rest = parts[2].partition(" ")
            if head != "strip":
                raise ParseError("line %d: expected 'strip'" % lineno)
            for ftxt in rest.split(","):
                if ftxt.strip():
                    cands.append(parse_poly(ftxt.strip(), variables))
        stages.append((var, cands))
    if not stages:
        raise ParseError("empty elimination script")
    return stages


_CUBIC_PARAMS = ("a1", "a2", "a3", "b1", "b2", "b3")

_FULL_CANDS = ("b2", "b3", "a3-b3", "a3+b3", "a3-b2", "a3+b2", "a3",
               "5*a3+b3", "3*a3-b3")

DEFAULT_SCRIPT_TEXT = (
    "eliminate a2 strip b2,b3\n"
    + "\n".join("eliminate %s strip %s" % (v, ",".join(_FULL_CANDS))
                for v in ("a1", "b1", "b2")) + "\n")


def default_script() -> list[tuple[str, list[Polynomial]]]:
    """The cascade used for the cubic Kolmogorov family:
    a2 -> a1 -> b1 -> b2, stripping the known linear factors."""
    return parse_script(DEFAULT_SCRIPT_TEXT, _CUBIC_PARAMS)


# ---------------------------------------------------------------------------
# Branch solving
# ---------------------------------------------------------------------------

def _prim6(p: Polynomial, variables) -> Polynomial:
    return _normalized(p, variables)


def _subs_polys(polys, var, expr, variables):
    out = []
    for p in polys:
        r = as_ratfunc(p).substitute({var: expr})
        out.append(_prim6(r.num, variables))
    return out


class _BranchSolver:
    """Recursive triangularization of a polynomial system in the parameters.

    Branching rules, applied to the lowest-degree polynomial:
      1. a monomial factor splits into one branch per vanishing variable
         plus the cofactor branch;
      2. a dividing candidate factor (linear) splits into factor = 0 versus
         the cofactor;
      3. a variable of degree one splits into A != 0 (solve v = -B/A) versus
         A = B = 0.
    Substitutions that divide by zero signal inconsistency with an earlier
    nonvanishing assumption and prune the branch.
    """

    def __init__(self, variables, candidates, max_depth=22):
        self.variables = tuple(variables)
        self.candidates = list(candidates)
        self.max_depth = max_depth
        self.results: list[dict[str, RationalFunction]] = []
        self.seen: set = set()
        self.capped = 0

    def solve(self, polys, bindings, free, depth=0):
        polys = [_prim6(p, self.variables) for p in polys if not p.is_zero()]
        polys = [p for p in polys if not p.is_zero()]
        if any(p.is_constant() for p in polys):
            return
        key = (tuple(sorted(str(p) for p in polys)),
               tuple(sorted((k, str(v)) for k, v in bindings.items())))
        if key in self.seen:
            return
        self.seen.add(key)
        if not polys:
            self.results.append(dict(bindings))
            return
        if depth > self.max_depth:
            self.capped += 1
            return
        polys.sort(key=lambda p: (p.total_degree(), len(p.terms)))
        p, rest = polys[0], polys[1:]
        mc = p.monomial_content()
        if any(mc):
            for v, k in zip(p.variables, mc):
                if k:
                    self._bind(v, RationalFunction.zero(), polys, bindings,
                               free, depth)
            q = p.div_monomial(mc)
            if not q.is_constant():
                self.solve([q] + rest, bindings, free, depth + 1)
            return
        for c in self.candidates:
            if not set(c.used_variables()) <= set(free):
                continue
            cv = c.with_variables(p.variables)
            if cv.divides(p):
                q = p.exact_div(cv)
                v = c.used_variables()[0]
                a = cv.coeff_of(v, 1)
                b = cv.coeff_of(v, 0)
                self._bind(v, RationalFunction(-b, a), polys, bindings,
                           free, depth)
                if not q.is_constant():
                    self.solve([q] + rest, bindings, free, depth + 1)
                return
        best = None
        for v in free:
            if p.degree_in(v) == 1:
                a = p.coeff_of(v, 1)
                score = (len(a.terms), a.total_degree())
                if best is None or score < best[0]:
                    best = (score, v, a)
        if best is None:
            self.capped += 1  # no linear variable left; give up on the leaf
            return
        _, v, a = best
        b = p.coeff_of(v, 0)
        self._bind(v, RationalFunction(-b, a),
                   [Polynomial.zero(self.variables)] + rest, bindings,
                   free, depth)
        if not a.is_constant():
            self.solve([a, b] + rest, bindings, free, depth + 1)

    def _bind(self, v, expr, polys, bindings, free, depth):
        nb = {}
        try:
            for k, old in bindings.items():
                nb[k] = old.substitute({v: expr}).reduced()
        except ZeroDivisionError:
            return  # contradicts an earlier A != 0 assumption
        nb[v] = expr.reduced()
        npolys = _subs_polys(polys, v, expr, self.variables)
        nfree = tuple(f for f in free if f != v)
        self.solve(npolys, nb, nfree, depth + 1)


def solve_branch(polys: Sequence[Polynomial], constraint_var: str,
                 constraint_expr: RationalFunction,
                 variables: Sequence[str] = _CUBIC_PARAMS,
                 candidates: Sequence[Polynomial] | None = None,
                 max_depth: int = 22) -> list[dict[str, str]]:
    """Solutions (triangular parameter bindings, as canonical strings) of the
    system restricted to the branch constraint_var = constraint_expr."""
    if candidates is None:
        candidates = _solver_candidates(variables)
    solver = _BranchSolver(variables, candidates, max_depth)
    start = _subs_polys(polys, constraint_var, constraint_expr, variables)
    free = tuple(v for v in variables if v != constraint_var)
    solver.solve(start, {constraint_var: constraint_expr}, free)
    out = []
    seen = set()
    for sol in solver.results:
        s = {k: str(v) for k, v in sol.items()}
        key = tuple(sorted(s.items()))
        if key not in seen:
            seen.add(key)
            out.append(s)
    return out


_SOLVER_CAND_TEXT = ("a3-b3", "a3+b3", "a3-b2", "a3+b2", "a2-b2", "a2+b2",
                     "a2-b3", "a2+b3", "a1-b1", "a1+b1", "b2-b3", "b2+b3",
                     "5*a3+b3", "3*a3-b3", "5*b2+a2", "3*b2-a2")


def _solver_candidates(variables):
    out = []
    for s in _SOLVER_CAND_TEXT:
        try:
            out.append(parse_poly(s, variables))
        except ParseError:
            pass  # candidate mentions a variable absent from this system
    return out


# ---------------------------------------------------------------------------
# Solution verification, symmetry, and variety comparison
# ---------------------------------------------------------------------------

def _parse_solution(sol: Mapping[str, str], variables
                    ) -> dict[str, RationalFunction]:
    return {k: parse_ratfunc(v, variables) for k, v in sol.items()}


def verify_solution(constants: Sequence[RationalFunction],
                    sol: Mapping[str, str],
                    variables: Sequence[str] = _CUBIC_PARAMS) -> bool:
    """Exact check that the bindings annihilate every given constant."""
    binds = _parse_solution(sol, variables)
    for L in constants:
        r = as_ratfunc(L).substitute(binds)
        if not r.reduced().is_zero():
            return False
    return True


# The cubic family's parameter symmetry induced by (x, y, t) -> (y, x, -t).
CUBIC_SYMMETRY = {"a1": "b1", "b1": "a1", "a2": "b3", "b3": "a2",
                  "a3": "b2", "b2": "a3"}


def _sample_points(sol: Mapping[str, RationalFunction], variables,
                   count: int, rng: random.Random) -> list[dict[str, mpq]]:
    """Random rational points on a triangular variety: free variables get
    random values, bound variables are evaluated."""
    free = [v for v in variables if v not in sol]
    pts = []
    attempts = 0
    while len(pts) < count and attempts < 40 * count:
        attempts += 1
        pt = {v: mpq(rng.randint(-30, 30), rng.randint(1, 7)) for v in free}
        try:
            for var, expr in sol.items():
                pt[var] = expr.evaluate(pt)
        except (ZeroDivisionError, ValueError):
            continue
        pts.append(pt)
    return pts


def _contains(sol: Mapping[str, RationalFunction],
              points: Sequence[Mapping[str, mpq]]) -> bool:
    """True iff every point satisfies all the binding equations of sol."""
    for pt in points:
        for var, expr in sol.items():
            try:
                if expr.evaluate(pt) != pt[var]:
                    return False
            except ZeroDivisionError:
                return False
    return True


def same_variety(a: Mapping[str, str], b: Mapping[str, str],
                 variables: Sequence[str] = _CUBIC_PARAMS,
                 samples: int = 8, seed: int = 0) -> bool:
    """Heuristic variety equality for triangular solutions: equal binding
    counts (dimension) plus mutual containment at random sample points."""
    if len(a) != len(b):
        return False
    rng = random.Random(seed)
    ra = _parse_solution(a, variables)
    rb = _parse_solution(b, variables)
    pa = _sample_points(ra, variables, samples, rng)
    pb = _sample_points(rb, variables, samples, rng)
    if len(pa) < samples // 2 or len(pb) < samples // 2:
        return False
    return _contains(rb, pa) and _contains(ra, pb)


def symmetry_image(points: Sequence[Mapping[str, mpq]],
                   sigma: Mapping[str, str] = CUBIC_SYMMETRY):
    return [{sigma.get(k, k): v for k, v in pt.items()} for pt in points]


def symmetric_variety(a: Mapping[str, str], b: Mapping[str, str],
                      variables: Sequence[str] = _CUBIC_PARAMS,
                      sigma: Mapping[str, str] = CUBIC_SYMMETRY,
                      samples: int = 8, seed: int = 0) -> bool:
    """True iff b is the sigma-image of a (mutual containment of sigma-mapped
    sample points)."""
    if len(a) != len(b):
        return False
    rng = random.Random(seed)
    ra = _parse_solution(a, variables)
    rb = _parse_solution(b, variables)
    pa = _sample_points(ra, variables, samples, rng)
    pb = _sample_points(rb, variables, samples, rng)
    if len(pa) < samples // 2 or len(pb) < samples // 2:
        return False
    return _contains(rb, symmetry_image(pa, sigma)) and \
        _contains(ra, symmetry_image(pb, sigma))


def _nondegenerate(sol: Mapping[str, str], variables) -> bool:
    """The bindings must define an actual system: denominators not
    identically zero (guaranteed by construction) and at least one sample
    point with positive linearization determinant.  For the normal form the
    determinant is identically 1, so this only rejects empty varieties."""
    ra = _parse_solution(sol, variables)
    return bool(_sample_points(ra, variables, 1, random.Random(1)))


# ---------------------------------------------------------------------------
# The full cascade
# ---------------------------------------------------------------------------

@dataclass
class VarietyBranch:
    """One branch of the center variety: a defining linear constraint and the
    solutions found on it (triangular parameter bindings as canonical
    strings), each verified against L_1..L_6 by exact substitution."""

    name: str
    constraint: tuple[str, str]          # (variable, expression text)
    solutions: list[dict[str, str]]
    rejected: int = 0                    # raw solutions failing verification

    def to_json(self) -> dict:
        return {"name": self.name,
                "constraint": {"variable": self.constraint[0],
                               "value": self.constraint[1]},
                "solutions": self.solutions,
                "rejected": self.rejected}


@dataclass
class CascadeResult:
    steps: list[EliminationStep]
    branches: list[VarietyBranch]
    terminal_gcd: Polynomial | None
    unresolved: list[dict]               # non-rational terminal directions

    def all_solutions(self) -> list[dict[str, str]]:
        out = []
        for br in self.branches:
            out.extend(br.solutions)
        return out

    def distinct_solutions(self, variables=_CUBIC_PARAMS,
                           modulo_symmetry: bool = False
                           ) -> list[dict[str, str]]:
        """Deduplicate by variety equality (optionally also under the
        a<->b symmetry) and drop degenerate varieties."""
        kept: list[dict[str, str]] = []
        for sol in self.all_solutions():
            if not _nondegenerate(sol, variables):
                continue
            dup = False
            for other in kept:
                if same_variety(sol, other, variables):
                    dup = True
                    break
                if modulo_symmetry and symmetric_variety(sol, other,
                                                         variables):
                    dup = True
                    break
            if not dup:
                kept.append(sol)
        return kept

    def to_json(self) -> dict:
        return {
            "stages": [{"eliminated": st.var,
                        "stripped_degrees": st.degrees(),
                        "removed_factors": [
                            [[str(f), m] for f, m in removed]
                            for _, removed in st.outputs]}
                       for st in self.steps],
            "branches": [br.to_json() for br in self.branches],
            "terminal_gcd": (str(self.terminal_gcd)
                             if self.terminal_gcd is not None else None),
            "unresolved": self.unresolved,
        }

    def to_json_text(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def simplest_rational(lo: mpq, hi: mpq) -> mpq:
    """The rational with smallest denominator (then smallest numerator
    magnitude) in the closed interval [lo, hi]."""
    if lo > hi:
        raise ValueError("empty interval")
    if lo <= 0 <= hi:
        return mpq(0)
    if hi < 0:
        return -simplest_rational(-hi, -lo)

    def rec(a: mpq, b: mpq) -> mpq:  # 0 < a <= b
        fa = a.numerator // a.denominator
        if a == fa:
            return mpq(fa)
        if fa + 1 <= b:
            return mpq(fa + 1)
        return fa + 1 / rec(1 / (b - fa), 1 / (a - fa))

    return rec(lo, hi)


def _terminal_branches(g: Polynomial, variables) -> tuple[list, list]:
    """Split a homogeneous bivariate terminal gcd into rational linear
    directions (new branches) and unresolved irrational directions reported
    with isolating intervals for t = second/first variable."""
    used = g.used_variables()
    if len(used) != 2:
        return [], [{"note": "terminal gcd not bivariate",
                     "poly": str(g)}]
    u, v = used  # homogeneous in (u, v); set v = t*u
    t = Polynomial.var("t")
    work = g.drop_unused()
    subs = work.subs_poly({u: Polynomial.const(1, ("t",)), v: t})
    branches = []
    unresolved = []
    tight = mpq(1, 10 ** 24)
    for iv in isolate_real_roots(subs, var="t"):
        if iv.width() > 0:
            # a rational root strictly inside the interval is found exactly:
            # refine, take the simplest rational in the refinement, and test
            iv = refine_root(subs, iv, tight, var="t")
            if iv.width() > 0:
                t0 = simplest_rational(iv.lo, iv.hi)
                if subs.evaluate({"t": t0}) == 0:
                    iv = RationalInterval(t0, t0)
        if iv.width() == 0:  # rational direction v = t0 * u
            t0 = iv.lo
            branches.append((v, "%s*%s" % (t0, u) if t0 != 1 else u))
        else:
            unresolved.append({
                "direction": "%s = t*%s" % (v, u),
                "isolating_interval": [str(iv.lo), str(iv.hi)],
            })
    return branches, unresolved


def run_cascade(constants: Sequence[RationalFunction],
                script: Sequence[tuple[str, list[Polynomial]]] | None = None,
                variables: Sequence[str] = _CUBIC_PARAMS,
                max_depth: int = 22) -> CascadeResult:
    """Execute the elimination stages, derive the variety branches from the
    stripped linear factors (plus rational directions of the terminal gcd),
    solve each branch, and keep only solutions annihilating every constant.
    """
    if script is None:
        script = default_script()
    variables = tuple(variables)
    polys = [_normalized(as_ratfunc(L).reduced().num, variables)
             for L in constants]
    steps: list[EliminationStep] = []
    current = polys
    branch_factors: list[Polynomial] = []
    for var, cands in script:
        live = [p for p in current if p.degree_in(var) > 0]
        inert = [p for p in current if p.degree_in(var) == 0]
        if len(live) < 2:
            raise ValueError(
                "stage %r has fewer than two polynomials involving the "
                "variable; choose a different elimination order" % var)
        step = eliminate_step(live, var, cands)
        steps.append(step)
        if not step.stripped() and not inert:
            raise ValueError(
                "stage %r produced only identically-zero resultants; "
                "choose a different elimination order" % var)
        for _, removed in step.outputs:
            for f, _m in removed:
                if f.total_degree() == 1 and all(
                        str(f) != str(g) for g in branch_factors):
                    branch_factors.append(f)
        current = [_normalized(p, variables)
                   for p in step.stripped() + inert]

    # terminal residual: common factor of the surviving polynomials
    terminal = None
    unresolved: list[dict] = []
    extra: list[tuple[str, str]] = []
    if current:
        g = current[0]
        for p in current[1:]:
            g = gcd_poly(g, p)
        g = _normalized(g, variables)
        if not g.is_constant():
            terminal = g
            extra, unresolved = _terminal_branches(g, variables)

    # branch constraints: each stripped linear factor, solved once per
    # variable it involves (the solver's search is orientation-dependent,
    # so both charts are explored and their solutions merged per branch)
    constraints: list[tuple[str, list[tuple[str, str]]]] = []
    for f in branch_factors:
        orients = []
        for v in f.used_variables():
            a = f.coeff_of(v, 1)
            b = f.coeff_of(v, 0)
            orients.append((v, str(RationalFunction(-b, a).reduced())))
        constraints.append((str(f), orients))
    for c in extra:
        f = parse_poly("%s - (%s)" % c, variables)
        if all(str(f) != name for name, _ in constraints):
            constraints.append((str(f), [c]))

    solver_cands = _solver_candidates(variables)
    branches: list[VarietyBranch] = []
    for i, (_fname, orients) in enumerate(constraints, 1):
        merged: list[dict[str, str]] = []
        keys: set = set()
        bad = 0
        for var, etxt in orients:
            expr = parse_ratfunc(etxt, variables)
            raw = solve_branch(polys, var, expr, variables, solver_cands,
                               max_depth)
            for sol in raw:
                key = tuple(sorted(sol.items()))
                if key in keys:
                    continue
                keys.add(key)
                if verify_solution(constants, sol, variables):
                    merged.append(sol)
                else:
                    bad += 1
        branches.append(VarietyBranch("R%d" % i, orients[0], merged, bad))
    return CascadeResult(steps, branches, terminal, unresolved)


def _mpq_str(x) -> str:
    f = Fraction(str(x))
    return "%d/%d" % (f.numerator, f.denominator)
