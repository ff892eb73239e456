"""Command-line interface.

Verbs: compute, center, eliminate, bifurcate, certify, pipeline, simulate.
Exit codes: 0 = success / certificate issued, 2 = indeterminate or
verification failed, 1 = error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .bifurcation import linear_parts, rank_pivots, series_eliminate
from .centers import DarbouxCandidate, darboux_check, verify_center
from .certify import (Indeterminate, certified_nonvanishing,
                      certified_simple_root_1d, gershgorin_nonsingular,
                      parse_box, pm_certify)
from .driver import (PRESETS, PipelineSpec, StageError, get_preset,
                     run_pipeline, simulate_trajectory, trajectory_csv)
from .elimination import parse_script, run_cascade
from .intervals import RationalInterval
from .lyapunov import compute_lyapunov, evaluate_lyapunov_at
from .parsing import ParseError, parse_ratfunc
from .poly import Truncation, rational
from .system import (NormalFormSystem, PerturbationTemplate, load_system,
                     perturb, reversibility_check)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INDETERMINATE = 2


def _emit(obj) -> None:
    json.dump(obj, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _normal_form(path: str) -> NormalFormSystem:
    sys_ = load_system(path)
    return NormalFormSystem(sys_.state, sys_.params, sys_.P, sys_.Q)


def _parse_bindings(text: str) -> dict:
    out = {}
    for chunk in text.split(","):
        if not chunk.strip():
            continue
        k, _, v = chunk.partition("=")
        out[k.strip()] = rational(v.strip())
    return out


# ---------------------------------------------------------------------------
# Verbs
# ---------------------------------------------------------------------------

def _cmd_compute(args) -> int:
    sys_ = _normal_form(args.system)
    if args.eval:
        point = _parse_bindings(args.eval)
        values = evaluate_lyapunov_at(sys_, point, args.order)
        _emit({"point": {k: str(v) for k, v in point.items()},
               "constants": [str(v) for v in values]})
        return EXIT_OK
    seq = compute_lyapunov(sys_, args.order)
    _emit({"convention": seq.convention,
           "parameters": list(seq.parameters),
           "constants": [str(L) for L in seq.constants]})
    return EXIT_OK


def _cmd_center(args) -> int:
    if args.family:
        ok = verify_center(args.family)
        _emit({"family": args.family, "verified": ok})
        return EXIT_OK if ok else EXIT_INDETERMINATE
    sys_ = load_system(args.system)
    if args.reversible:
        ok = reversibility_check(sys_, args.reversible)
        _emit({"reversible": args.reversible, "verified": ok})
        return EXIT_OK if ok else EXIT_INDETERMINATE
    if not args.darboux:
        raise ValueError("need --family, --darboux or --reversible")
    with open(args.darboux, "r", encoding="utf-8") as fh:
        cand = DarbouxCandidate.parse(fh.read(), sys_.variables)
    ok = darboux_check(sys_, cand)
    _emit({"darboux": args.darboux, "verified": ok})
    return EXIT_OK if ok else EXIT_INDETERMINATE


def _cmd_eliminate(args) -> int:
    sys_ = _normal_form(args.system)
    seq = compute_lyapunov(sys_, args.order)
    script = None
    if args.script:
        with open(args.script, "r", encoding="utf-8") as fh:
            script = parse_script(fh.read(), sys_.params)
    result = run_cascade(seq.constants, script=script, variables=sys_.params,
                         max_depth=args.max_depth)
    _emit(result.to_json())
    return EXIT_OK


def parse_template(text: str, variables) -> PerturbationTemplate:
    """Perturbation template file: 'cofactor dx|dy = expr' and
    'span dx|dy = name:i,j ...' directives ('#' comments)."""
    cof = {"dx": None, "dy": None}
    spans = {"dx": [], "dy": []}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rhs = line.partition("=")
        parts = head.split()
        if len(parts) != 2 or parts[1] not in ("dx", "dy"):
            raise ParseError("line %d: expected 'cofactor|span dx|dy = ...'"
                             % lineno)
        kind, eq = parts
        if kind == "cofactor":
            cof[eq] = parse_ratfunc(rhs.strip(), variables)
        elif kind == "span":
            for item in rhs.split():
                name, _, ij = item.partition(":")
                i, _, j = ij.partition(",")
                spans[eq].append((int(i), int(j), name.strip()))
        else:
            raise ParseError("line %d: unknown directive %r" % (lineno, kind))
    if cof["dx"] is None or cof["dy"] is None:
        raise ParseError("template needs cofactors for both dx and dy")
    return PerturbationTemplate(cofactors=(cof["dx"], cof["dy"]),
                                spans=(spans["dx"], spans["dy"]))


def _cmd_bifurcate(args) -> int:
    sys_ = _normal_form(args.system)
    with open(args.template, "r", encoding="utf-8") as fh:
        tpl = parse_template(fh.read(), sys_.variables)
    pert = perturb(sys_, tpl)
    lams = tuple(tpl.fresh_names())
    seq = compute_lyapunov(pert, args.order, trunc=Truncation(lams, 2))
    m = linear_parts(seq, lams)
    full = rank_pivots(m)
    pivots = full
    if args.pivots:
        spec = json.loads(args.pivots)
        pivots = {"rank": len(spec["pivot_rows"]),
                  "pivot_rows": spec["pivot_rows"],
                  "pivot_columns": spec["pivot_columns"]}
    reduced = series_eliminate(seq, lams, pivots=pivots)
    _emit({"lambdas": list(lams),
           "full_rank": full,
           "pivots": pivots,
           "reduced": reduced.to_json()})
    return EXIT_OK


def _functions_from_args(args):
    variables = tuple(args.vars.split(","))
    return [parse_ratfunc(t, variables) for t in args.function], variables


def _cmd_certify(args) -> int:
    if args.mode == "pm":
        fs, _ = _functions_from_args(args)
        box = parse_box(args.box)
        cert = pm_certify(fs, box, max_depth=args.max_depth,
                          precondition=args.precondition)
        if isinstance(cert, Indeterminate):
            _emit({"result": "indeterminate", "reason": cert.reason})
            return EXIT_INDETERMINATE
        _emit(cert.to_json())
        return EXIT_OK
    if args.mode == "gershgorin":
        with open(args.matrix, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
        m = [[RationalInterval(rational(e[0]), rational(e[1])) for e in row]
             for row in raw]
        cert = gershgorin_nonsingular(m)
        if isinstance(cert, Indeterminate):
            _emit({"result": "indeterminate", "reason": cert.reason})
            return EXIT_INDETERMINATE
        _emit(cert.to_json())
        return EXIT_OK
    if args.mode == "nonzero":
        fs, _ = _functions_from_args(args)
        box = parse_box(args.box)
        ok = all(certified_nonvanishing(f, box, max_depth=args.max_depth)
                 for f in fs)
        _emit({"result": "nonvanishing" if ok else "indeterminate"})
        return EXIT_OK if ok else EXIT_INDETERMINATE
    if args.mode == "root1d":
        fs, variables = _functions_from_args(args)
        if len(fs) != 1:
            raise ValueError("root1d takes exactly one function")
        box = parse_box(args.box)
        if len(box.variables) != 1:
            raise ValueError("root1d takes a one-variable box")
        var = box.variables[0]
        cert = certified_simple_root_1d(fs[0], box.intervals[var], var=var,
                                        max_depth=args.max_depth)
        if isinstance(cert, Indeterminate):
            _emit({"result": "indeterminate", "reason": cert.reason})
            return EXIT_INDETERMINATE
        _emit(cert.to_json())
        return EXIT_OK
    raise ValueError("unknown certify mode %r" % args.mode)


def _cmd_pipeline(args) -> int:
    if args.preset:
        spec = get_preset(args.preset)
    else:
        with open(args.spec, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
        spec = PipelineSpec(
            name=raw["name"], system_text=raw["system"],
            cofactors=tuple(raw["cofactors"]),
            spans=tuple([tuple(t) for t in span] for span in raw["spans"]),
            n_constants=raw["n_constants"], order=raw.get("order", 2),
            pivots=raw.get("pivots"), strategy=raw.get("strategy", "rank-only"),
            options=raw.get("options", {}))
    try:
        report = run_pipeline(spec)
    except StageError as exc:
        _emit(exc.report.to_json(args.normalize_timings))
        return EXIT_ERROR
    _emit(report.to_json(args.normalize_timings))
    return EXIT_OK


def _cmd_simulate(args) -> int:
    sys_ = load_system(args.system)
    if args.eval:
        sys_ = sys_.specialize(_parse_bindings(args.eval))
    start = [float(rational(t)) for t in args.start.split(",")]
    rows, blowup = simulate_trajectory(sys_, start, args.step, args.count)
    sys.stdout.write(trajectory_csv(rows, blowup))
    return EXIT_OK


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="lyap",
        description="Exact Lyapunov constants, center certification and "
                    "certified limit-cycle lower bounds.")
    sub = p.add_subparsers(dest="verb", required=True)

    c = sub.add_parser("compute", help="Lyapunov constants of a system")
    c.add_argument("--system", required=True)
    c.add_argument("--order", type=int, default=3)
    c.add_argument("--eval", default=None,
                   help="bind parameters 'k=v,...' and evaluate numerically")
    c.set_defaults(fn=_cmd_compute)

    c = sub.add_parser("center", help="verify a center certificate")
    csub = c.add_subparsers(dest="action", required=True)
    v = csub.add_parser("verify")
    v.add_argument("--system", default=None)
    v.add_argument("--family", default=None,
                   help="built-in cubic Kolmogorov family C1..C8")
    v.add_argument("--darboux", default=None,
                   help="file of 'factor = ... ; exponent = ...' lines")
    v.add_argument("--reversible", default=None, help="'y=x' or 'y=-x'")
    v.set_defaults(fn=_cmd_center)

    c = sub.add_parser("eliminate", help="resultant cascade on the constants")
    c.add_argument("--system", required=True)
    c.add_argument("--order", type=int, default=6)
    c.add_argument("--script", default=None,
                   help="file of 'eliminate <var> strip <f>,...' lines")
    c.add_argument("--max-depth", type=int, default=22)
    c.set_defaults(fn=_cmd_eliminate)

    c = sub.add_parser("bifurcate", help="linear parts, rank and reduction")
    c.add_argument("--system", required=True)
    c.add_argument("--template", required=True)
    c.add_argument("--order", type=int, required=True)
    c.add_argument("--pivots", default=None,
                   help='JSON {"pivot_rows": [...], "pivot_columns": [...]}')
    c.set_defaults(fn=_cmd_bifurcate)

    c = sub.add_parser("certify", help="certified zero/nonzero statements")
    c.add_argument("mode", choices=["pm", "gershgorin", "nonzero", "root1d"])
    c.add_argument("--function", action="append", default=[],
                   help="expression (repeatable)")
    c.add_argument("--vars", default="",
                   help="comma-separated variable names")
    c.add_argument("--box", default="",
                   help="'a=[-1/10,1/10] b=[0,1]'")
    c.add_argument("--matrix", default=None,
                   help="JSON file of [lo, hi] entries (gershgorin)")
    c.add_argument("--max-depth", type=int, default=12)
    c.add_argument("--precondition", action="store_true")
    c.set_defaults(fn=_cmd_certify)

    c = sub.add_parser("pipeline", help="run a full reproduction pipeline")
    g = c.add_mutually_exclusive_group(required=True)
    g.add_argument("--preset", choices=sorted(PRESETS))
    g.add_argument("--spec", help="JSON PipelineSpec file")
    c.add_argument("--normalize-timings", action="store_true",
                   help="zero out timings for byte-identical reports")
    c.set_defaults(fn=_cmd_pipeline)

    c = sub.add_parser("simulate", help="RK4 trajectory CSV (non-certified)")
    c.add_argument("--system", required=True)
    c.add_argument("--start", required=True, help="'x0,y0'")
    c.add_argument("--step", type=float, required=True)
    c.add_argument("--count", type=int, required=True)
    c.add_argument("--eval", default=None, help="bind parameters 'k=v,...'")
    c.set_defaults(fn=_cmd_simulate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, ParseError, OSError, ZeroDivisionError,
            RuntimeError) as exc:
        sys.stderr.write("error: %s\n" % exc)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
