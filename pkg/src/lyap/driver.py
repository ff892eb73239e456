"""Pipeline presets, JSON run reports, and a plain trajectory integrator.

A pipeline runs parse -> perturb -> Lyapunov -> rank -> reduce ->
zero-find -> certify -> bound, keeping partial results when a stage fails.
The five built-in presets reproduce the certified lower bounds 6, 13, 13,
18 and 22 for the cubic/quartic/quintic Kolmogorov center families.

Environment: LYAP_CHECKPOINT_DIR persists the (expensive) Lyapunov
sequences to disk in canonical text form; LYAP_THREADS is honored by the
modules this driver delegates to.
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from gmpy2 import mpq

from .bifurcation import (cyclicity_bound, find_zero, linear_parts,
                          rank_pivots, rationalize, series_eliminate)
from .certify import (Box, Indeterminate, certified_nonvanishing,
                      certified_simple_root_1d, gershgorin_nonsingular,
                      normalize_at_origin, pm_certify, recenter)
from .intervals import RationalInterval, interval_eval_rf
from .lyapunov import LyapunovSequence, compute_lyapunov
from .parsing import parse_poly, parse_ratfunc
from .poly import (Polynomial, RationalFunction, Truncation, as_ratfunc,
                   gcd_poly, rational)
from .roots import isolate_real_roots, refine_root
from .system import NormalFormSystem, PerturbationTemplate, parse_system, perturb


# ---------------------------------------------------------------------------
# Specs and reports
# ---------------------------------------------------------------------------

def _jsonable(v):
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (mpq, float)):
        return str(v)
    return v


@dataclass
class PipelineSpec:
    """Everything needed to reproduce one bifurcation pipeline."""

    name: str
    system_text: str                       # normal-form system file text
    cofactors: tuple[str, str]             # per-equation cofactor expressions
    spans: tuple[list, list]               # [(i, j, name), ...] per equation
    n_constants: int
    order: int = 2
    pivots: dict | None = None             # explicit pivot rows/columns
    strategy: str = "rank-only"            # | "simple-root" | "pm-pair"
                                           # | "quadratic-chain"
    options: dict = field(default_factory=dict)

    def lambdas(self) -> tuple[str, ...]:
        return tuple(n for span in self.spans for (_, _, n) in span)

    def to_json(self) -> dict:
        return {"name": self.name,
                "system": self.system_text,
                "cofactors": list(self.cofactors),
                "spans": [[list(t) for t in span] for span in self.spans],
                "n_constants": self.n_constants,
                "order": self.order,
                "pivots": self.pivots,
                "strategy": self.strategy,
                "options": _jsonable(self.options)}


@dataclass
class StageRecord:
    name: str
    seconds: float
    summary: dict = field(default_factory=dict)
    error: str | None = None

    def to_json(self, normalize_timings: bool = False) -> dict:
        out = {"stage": self.name,
               "seconds": 0.0 if normalize_timings else round(self.seconds, 3)}
        if self.summary:
            out["summary"] = self.summary
        if self.error is not None:
            out["error"] = self.error
        return out


@dataclass
class RunReport:
    spec: PipelineSpec
    stages: list[StageRecord] = field(default_factory=list)
    ranks: dict = field(default_factory=dict)
    reduced: list = field(default_factory=list)
    certificates: list = field(default_factory=list)
    cyclicity: object | None = None
    error: str | None = None

    @property
    def bound(self) -> int | None:
        return self.cyclicity.bound if self.cyclicity is not None else None

    def to_json(self, normalize_timings: bool = False) -> dict:
        return {"spec": self.spec.to_json(),
                "stages": [s.to_json(normalize_timings) for s in self.stages],
                "ranks": self.ranks,
                "reduced": self.reduced,
                "certificates": [c.to_json() if hasattr(c, "to_json")
                                 else str(c) for c in self.certificates],
                "cyclicity": (self.cyclicity.to_json()
                              if self.cyclicity is not None else None),
                "error": self.error}

    def to_json_text(self, normalize_timings: bool = False) -> str:
        return json.dumps(self.to_json(normalize_timings), indent=2)


class StageError(RuntimeError):
    def __init__(self, stage: str, cause: BaseException, repro: str):
        super().__init__("stage %r failed: %s (reproduce with: %s)"
                         % (stage, cause, repro))
        self.stage = stage
        self.cause = cause
        self.repro = repro


# ---------------------------------------------------------------------------
# Checkpointing
# ---------------------------------------------------------------------------

def _checkpoint_path(name: str) -> str | None:
    d = os.environ.get("LYAP_CHECKPOINT_DIR")
    if not d:
        return None
    os.makedirs(d, exist_ok=True)
    return os.path.join(d, "%s.constants.txt" % name)


def _save_sequence(path: str, seq: LyapunovSequence) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("params %s\n" % " ".join(seq.parameters))
        for L in seq.constants:
            fh.write(str(L) + "\n")


def _load_sequence(path: str, n: int) -> LyapunovSequence | None:
    if not os.path.exists(path):
        return None
    with open(path, "r", encoding="utf-8") as fh:
        lines = [l.rstrip("\n") for l in fh if l.strip()]
    if not lines or not lines[0].startswith("params "):
        return None
    params = tuple(lines[0].split()[1:])
    body = lines[1:]
    if len(body) < n:
        return None
    constants = [parse_ratfunc(l, params) for l in body[:n]]
    return LyapunovSequence(constants, parameters=params)


# ---------------------------------------------------------------------------
# Pipeline
# ---------------------------------------------------------------------------

def _timed(report: RunReport, name: str, repro: str, fn):
    t0 = time.time()
    try:
        out = fn()
    except BaseException as exc:
        report.stages.append(StageRecord(name, time.time() - t0,
                                         error=str(exc)))
        report.error = "stage %r: %s" % (name, exc)
        raise StageError(name, exc, repro) from exc
    report.stages.append(StageRecord(name, time.time() - t0))
    return out


def run_pipeline(spec: PipelineSpec) -> RunReport:
    """Execute the pipeline; on a stage failure the partial report is
    attached to the raised StageError as ``.report``."""
    report = RunReport(spec)
    try:
        _run(spec, report)
    except StageError as exc:
        exc.report = report
        raise
    return report


def _run(spec: PipelineSpec, report: RunReport) -> None:
    sys0 = _timed(report, "parse", "lyap compute --system <file>",
                  lambda: parse_system(spec.system_text))
    base = NormalFormSystem(sys0.state, sys0.params, sys0.P, sys0.Q)

    def _perturb():
        allv = base.variables
        cof = tuple(parse_ratfunc(c, allv) for c in spec.cofactors)
        tpl = PerturbationTemplate(cofactors=cof,
                                   spans=tuple(list(s) for s in spec.spans))
        return perturb(base, tpl)

    pert = _timed(report, "perturb", "lyap bifurcate --system <file>", _perturb)
    lams = spec.lambdas()

    def _lyapunov():
        path = _checkpoint_path(spec.name)
        if path:
            seq = _load_sequence(path, spec.n_constants)
            if seq is not None and seq.parameters == pert.params:
                return seq
        seq = compute_lyapunov(pert, spec.n_constants,
                               trunc=Truncation(lams, spec.order))
        if path:
            _save_sequence(path, seq)
        return seq

    seq = _timed(report, "lyapunov",
                 "lyap compute --system <file> --order %d" % spec.n_constants,
                 _lyapunov)

    def _rank():
        m = linear_parts(seq, lams)
        full = rank_pivots(m)
        pivots = spec.pivots if spec.pivots is not None else full
        report.ranks = {"full": full, "used": pivots}
        return pivots

    pivots = _timed(report, "rank", "lyap bifurcate ... --pivots auto", _rank)

    reduced = _timed(report, "reduce", "lyap bifurcate ...",
                     lambda: series_eliminate(
                         seq, lams, pivots=pivots, order=spec.order,
                         distinguished=spec.options.get("distinguished")))
    report.reduced = [rc.to_json() for rc in reduced.reduced]

    strategy = _STRATEGIES.get(spec.strategy)
    if strategy is None:
        raise StageError("certify", ValueError(
            "unknown strategy %r" % spec.strategy), "lyap certify --help")
    cyc = _timed(report, "certify+bound", "lyap certify ...",
                 lambda: strategy(spec, reduced, report))
    report.cyclicity = cyc


# ---------------------------------------------------------------------------
# Certification strategies
# ---------------------------------------------------------------------------

def _rank_only(spec, reduced, report):
    return cyclicity_bound("rank-only", reduced.r)


def _survivor_coefficients(rc, survivors):
    return {s: rc.coefficient(s) for s in survivors
            if not rc.coefficient(s).is_zero()}


def _simple_root(spec, reduced, report):
    """One family parameter: certify a simple common root of the first
    reduced linear form's coefficients with the next form nonvanishing."""
    opts = spec.options
    mu = opts["mu"]
    firsts = [rc for rc in reduced.reduced if rc.kind == "first-order"]
    if len(firsts) < 2:
        raise ValueError("need two first-order reduced constants")
    f1, f2 = firsts[0], firsts[1]
    survivors = [l for l in spec.lambdas() if l not in reduced.pivots]
    c1 = _survivor_coefficients(f1, survivors)
    # the form vanishes at mu-values where every coefficient numerator does
    g = None
    for c in c1.values():
        g = c.num if g is None else gcd_poly(g, c.num)
    exclude = [parse_poly(t, (mu,)) for t in opts.get("exclude", [])]
    certs = []
    chosen = None
    for iv in isolate_real_roots(g, var=mu):
        r = refine_root(g, iv, rational(opts.get("refine_width", mpq(1, 10 ** 30))),
                        var=mu)
        if r.lo == r.hi:            # rational root: widen for strict signs
            w = mpq(1, 10 ** 15)
            r = RationalInterval(r.lo - w, r.hi + w)
        box = Box({mu: r})
        try:
            if any(not certified_nonvanishing(as_ratfunc(e), box)
                   for e in exclude):
                continue
            root = certified_simple_root_1d(as_ratfunc(g), r, var=mu)
            if isinstance(root, Indeterminate):
                continue
            # the next form is nonzero if any of its coefficients is
            nz = any(certified_nonvanishing(c, box)
                     for c in _survivor_coefficients(f2, survivors).values())
        except ZeroDivisionError:
            continue
        if not nz:
            continue
        chosen = r
        certs = [root, "nonvanishing:L%d" % f2.index]
        break
    if chosen is None:
        raise ValueError("no certifiable simple root of the reduced form")
    report.certificates = [certs[0]]
    mid = chosen.midpoint()
    return cyclicity_bound("first-order", reduced.r, ell=int(opts.get("ell", 1)),
                           certificates=certs, point={mu: mid})


def _interval_jacobian(fs, names, box):
    rows = []
    for f in fs:
        rows.append([interval_eval_rf(f.differentiate(v), box.intervals)
                     for v in names])
    return rows


def _apply_preconditioner(pm, fs):
    """The functions the PM certificate actually bounded: J^{-1} * fs when a
    preconditioner was recorded, fs otherwise."""
    if pm.preconditioner is None:
        return list(fs)
    out = []
    for row in pm.preconditioner:
        acc = RationalFunction.zero()
        for c, f in zip(row, fs):
            acc = acc + f.scale(c)
        out.append(acc.reduced())
    return out


def _pm_pair(spec, reduced, report):
    """Two family parameters: Poincare-Miranda existence for the first two
    reduced coefficient functions, Gershgorin transversality, and a
    nonvanishing check for the third."""
    opts = spec.options
    mus = list(opts["mu"])
    firsts = [rc for rc in reduced.reduced if rc.kind == "first-order"]
    if len(firsts) < 3:
        raise ValueError("need three first-order reduced constants")
    survivors = [l for l in spec.lambdas() if l not in reduced.pivots]
    coeffs = []
    for rc in firsts[:3]:
        cs = _survivor_coefficients(rc, survivors)
        if len(cs) != 1:
            raise ValueError("expected a single surviving direction, got %s"
                             % sorted(cs))
        coeffs.append(next(iter(cs.values())))
    f1, f2, f3 = coeffs
    seed = {k: rational(v) for k, v in opts["seed"].items()}
    approx = find_zero([f1, f2], seed, unknowns=mus)
    point = {k: rationalize(float(v), int(opts.get("max_den", 10 ** 15)))
             for k, v in approx.items()}
    h = rational(opts.get("h", mpq(1, 10 ** 10)))
    g1, g2, g3 = normalize_at_origin(recenter([f1, f2, f3], point))
    box = Box({m: RationalInterval(-h, h) for m in mus})
    pm = pm_certify([g1, g2], box,
                    max_depth=int(opts.get("max_depth", 12)),
                    precondition=bool(opts.get("precondition", True)))
    if isinstance(pm, Indeterminate):
        raise ValueError("Poincare-Miranda failed: %s" % pm.reason)
    jfs = _apply_preconditioner(pm, [g1, g2])
    gg = gershgorin_nonsingular(_interval_jacobian(jfs, mus, box))
    if isinstance(gg, Indeterminate):
        raise ValueError("Gershgorin transversality failed: %s" % gg.reason)
    if not certified_nonvanishing(g3, box,
                                  max_depth=int(opts.get("max_depth", 12))):
        raise ValueError("last reduced function not certified nonvanishing")
    report.certificates = [pm, gg]
    return cyclicity_bound("first-order", reduced.r, ell=2,
                           certificates=[pm, gg,
                                         "nonvanishing:L%d" % firsts[2].index],
                           point=point)


def _quadratic_chain(spec, reduced, report):
    """Second-order accounting: certify a common zero of all but the last
    quadratic form, transversality there, and the last form nonvanishing."""
    opts = spec.options
    quads = [rc for rc in reduced.reduced if rc.kind == "quadratic"]
    if len(quads) < 2:
        raise ValueError("need a chain of at least two quadratic forms")
    common = opts.get("common_factor")
    forms = []
    for rc in quads:
        v = rc.value
        if common is not None:
            v = (v / as_ratfunc(Polynomial.var(common))).reduced()
        forms.append(v)
    head, last = forms[:-1], forms[-1]
    pin = {k: rational(v) for k, v in opts.get("pin", {}).items()}
    unknowns = [u for u in opts["unknowns"] if u not in pin]
    if len(unknowns) != len(head):
        raise ValueError("need as many free unknowns as solved forms")
    pinned = [f.substitute({k: as_ratfunc(v) for k, v in pin.items()}).reduced()
              for f in forms]
    seed = {k: rational(v) for k, v in opts["seed"].items()}
    approx = find_zero(pinned[:-1], seed, unknowns=unknowns)
    point = {k: rationalize(float(v), int(opts.get("max_den", 10 ** 15)))
             for k, v in approx.items()}
    h = rational(opts.get("h", mpq(1, 10 ** 10)))
    shifted = normalize_at_origin(recenter(pinned, point))
    box = Box({m: RationalInterval(-h, h) for m in unknowns})
    pm = pm_certify(shifted[:-1], box,
                    max_depth=int(opts.get("max_depth", 12)),
                    precondition=bool(opts.get("precondition", True)))
    if isinstance(pm, Indeterminate):
        raise ValueError("Poincare-Miranda failed: %s" % pm.reason)
    jfs = _apply_preconditioner(pm, shifted[:-1])
    gg = gershgorin_nonsingular(_interval_jacobian(jfs, unknowns, box))
    if isinstance(gg, Indeterminate):
        raise ValueError("Gershgorin transversality failed: %s" % gg.reason)
    if not certified_nonvanishing(shifted[-1], box,
                                  max_depth=int(opts.get("max_depth", 12))):
        raise ValueError("last form not certified nonvanishing")
    full_point = dict(pin)
    full_point.update(point)
    report.certificates = [pm, gg]
    return cyclicity_bound("second-order", reduced.r, ell=len(forms),
                           certificates=[pm, gg,
                                         "nonvanishing:L%d" % quads[-1].index],
                           point=full_point)


_STRATEGIES = {"rank-only": _rank_only,
               "simple-root": _simple_root,
               "pm-pair": _pm_pair,
               "quadratic-chain": _quadratic_chain}


# ---------------------------------------------------------------------------
# Presets
# ---------------------------------------------------------------------------

def _span(names_by_degree: Mapping[int, Sequence[str]] | None = None,
          prefix: str = "a", degrees: Sequence[int] = (2, 3),
          skip: Sequence[str] = ()) -> list:
    """Monomial span [(i, j, prefix+str(i)+str(j))] of the given total
    degrees, graded, x-power descending, minus ``skip``."""
    out = []
    for d in degrees:
        for i in range(d, -1, -1):
            j = d - i
            name = "%s%d%d" % (prefix, i, j)
            if name not in skip:
                out.append((i, j, name))
    return out


_PROP41_SYSTEM = """
vars x y
params a3
dx = -(a3*y - 2*x + 1)*(1 - (a3^2 - 4)*x/2)*y
dy = (2*x - a3*y + 1)*(1 + (a3^2 - 4)*y/a3)*x
"""

_PROP42_SYSTEM = """
vars x y
params a b
dx = -(y - 2*x + 1)*(1 + 3*x/2)*y*(1 - a*y - b*x)
dy = (2*x - y + 1)*(1 - 3*y)*x*(1 - a*y - b*x)
"""

_PROP43_SYSTEM = """
vars x y
dx = -(29/40*x^2 - x*y + y^2 + x + y + 1)*(9*x/2 + 1)*y
dy = (29/40*x^2 - x*y + y^2 + x + y + 1)*(9*y/2 + 1)*x
"""

# quintic: the prop41 family at a3 = 2/3 times the conic of equilibria,
# translated to the origin and y-rescaled by -3 into normal form
_PROP44_SYSTEM = """
vars x y
dx = (9*x - 3*y - 8)*(x + 1)*(-3*y)*(9*x^2 + 18*y^2 - 32)/768
dy = -(9*x - 3*y + 8)*(1 - 3*y)*x*(9*x^2 + 18*y^2 - 32)/256
"""

# quintic: the prop43 center times an invariant straight line
_PROP45_SYSTEM = """
vars x y
dx = -(1 - 4*x - 2*y)*(29/40*x^2 - x*y + y^2 + x + y + 1)*(9*x/2 + 1)*y
dy = (1 - 4*x - 2*y)*(29/40*x^2 - x*y + y^2 + x + y + 1)*(9*y/2 + 1)*x
"""


def preset_prop41() -> PipelineSpec:
    return PipelineSpec(
        name="prop41",
        system_text=_PROP41_SYSTEM,
        cofactors=("1 - (a3^2 - 4)*x/2", "1 + (a3^2 - 4)*y/a3"),
        spans=(_span(prefix="a", degrees=(2,)), _span(prefix="b", degrees=(2,))),
        n_constants=6,
        pivots={"rank": 4, "pivot_rows": [0, 1, 2, 3],
                "pivot_columns": ["a02", "a11", "a20", "b02"]},
        strategy="simple-root",
        options={"mu": "a3", "ell": 1,
                 # the family degenerates where a denominator vanishes
                 "exclude": ["a3", "a3 - 2", "a3 + 2"]})


def preset_prop42() -> PipelineSpec:
    return PipelineSpec(
        name="prop42",
        system_text=_PROP42_SYSTEM,
        cofactors=("1 + 3*x/2", "1 - 3*y"),
        spans=(_span(prefix="a", degrees=(2, 3)),
               _span(prefix="b", degrees=(2, 3), skip=("b20", "b21", "b30"))),
        n_constants=13,
        pivots=None,                      # rank 10 on the first ten rows
        strategy="pm-pair",
        options={"mu": ["a", "b"],
                 "seed": {"a": mpq(1, 10), "b": mpq(1, 10)},
                 "h": mpq(1, 10 ** 10)})


def preset_prop43() -> PipelineSpec:
    return PipelineSpec(
        name="prop43",
        system_text=_PROP43_SYSTEM,
        cofactors=("9*x/2 + 1", "9*y/2 + 1"),
        spans=(_span(prefix="a", degrees=(2, 3)),
               _span(prefix="b", degrees=(2, 3), skip=("b30",))),
        n_constants=13,
        pivots={"rank": 8, "pivot_rows": [0, 1, 2, 3, 4, 5, 6, 7],
                "pivot_columns": ["a02", "a03", "a11", "a12", "a20", "a21",
                                  "a30", "b03"]},
        strategy="quadratic-chain",
        options={"common_factor": "b02",
                 "unknowns": ["b02", "b11", "b12", "b20", "b21"],
                 "pin": {"b02": 1},
                 "seed": {k: mpq(1, 10) for k in ("b11", "b12", "b20", "b21")}})


def preset_prop44() -> PipelineSpec:
    return PipelineSpec(
        name="prop44",
        system_text=_PROP44_SYSTEM,
        cofactors=("x + 1", "1 - 3*y"),
        spans=(_span(prefix="a", degrees=(2, 3, 4)),
               _span(prefix="b", degrees=(2, 3, 4))),
        n_constants=24,
        strategy="rank-only")


def preset_prop45() -> PipelineSpec:
    return PipelineSpec(
        name="prop45",
        system_text=_PROP45_SYSTEM,
        cofactors=("9*x/2 + 1", "9*y/2 + 1"),
        spans=(_span(prefix="a", degrees=(2, 3, 4)),
               _span(prefix="b", degrees=(2, 3, 4), skip=("b04", "b11"))),
        n_constants=22,
        pivots={"rank": 13, "pivot_rows": list(range(13)),
                "pivot_columns": ["a02", "a03", "a04", "a11", "a12", "a13",
                                  "a20", "a21", "a22", "a30", "a31", "a40",
                                  "b02"]},
        strategy="quadratic-chain",
        options={"unknowns": ["b03", "b12", "b13", "b20", "b21", "b22",
                              "b30", "b31", "b40"],
                 "pin": {"b40": 1},
                 "seed": {k: mpq(1, 10) for k in ("b03", "b12", "b13", "b20",
                                                  "b21", "b22", "b30", "b31")}})


PRESETS = {"prop41": preset_prop41,
           "prop42": preset_prop42,
           "prop43": preset_prop43,
           "prop44": preset_prop44,
           "prop45": preset_prop45}


def get_preset(name: str) -> PipelineSpec:
    try:
        return PRESETS[name]()
    except KeyError:
        raise ValueError("unknown preset %r (have: %s)"
                         % (name, ", ".join(sorted(PRESETS))))


# ---------------------------------------------------------------------------
# Plain numerical integration (non-certified; feeds CSV dumps)
# ---------------------------------------------------------------------------

_BLOWUP_NORM = 1e12


def _float_fn(f: RationalFunction, state):
    num = [(float(c), e) for e, c in f.num.terms.items()]
    den = [(float(c), e) for e, c in f.den.terms.items()]
    idx = [f.num.variables.index(s) for s in state]

    def ev(x, y):
        vals = [0.0, 0.0]
        out = []
        for terms in (num, den):
            acc = 0.0
            for c, e in terms:
                t = c
                for k, s in zip(idx, (x, y)):
                    if e[k]:
                        t *= s ** e[k]
                acc += t
            out.append(acc)
        return out[0] / out[1]

    return ev


def simulate_trajectory(sys, start, step: float, count: int):
    """Fixed-step RK4 rows (t, x, y); truncates with a blow-up flag when the
    state norm exceeds 1e12.  Explicitly non-certified."""
    if step <= 0:
        raise ValueError("step must be positive")
    if sys.params:
        raise ValueError("bind all parameters before integrating: %s"
                         % (sys.params,))
    p = _float_fn(sys.P, sys.state)
    q = _float_fn(sys.Q, sys.state)
    x, y = float(start[0]), float(start[1])
    rows = [(0.0, x, y)]
    blowup = False
    h = float(step)
    for n in range(1, count + 1):
        k1 = (p(x, y), q(x, y))
        k2 = (p(x + h / 2 * k1[0], y + h / 2 * k1[1]),
              q(x + h / 2 * k1[0], y + h / 2 * k1[1]))
        k3 = (p(x + h / 2 * k2[0], y + h / 2 * k2[1]),
              q(x + h / 2 * k2[0], y + h / 2 * k2[1]))
        k4 = (p(x + h * k3[0], y + h * k3[1]),
              q(x + h * k3[0], y + h * k3[1]))
        x += h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        y += h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        if (x * x + y * y) ** 0.5 > _BLOWUP_NORM:
            blowup = True
            break
        rows.append((n * h, x, y))
    return rows, blowup


def trajectory_csv(rows, blowup: bool) -> str:
    out = ["t,x,y"]
    out.extend("%.17g,%.17g,%.17g" % r for r in rows)
    if blowup:
        out.append("# blow-up detected, trajectory truncated")
    return "\n".join(out) + "\n"
