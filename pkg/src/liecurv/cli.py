"""Command-line interface.

    liecurv validate <file>
    liecurv frame <file>
    liecurv ricci <file> [--method trace|closed|oracle|all]
    liecurv qe-check <file> --x 1,0,0 --lambda 0.5 --m inf
    liecurv qe-solve <file> [--seeds k] [--tol t] [--normalize]
    liecurv gn-demo --n 1 --a 1 --lambda1 2 --c 1
    liecurv report <file> --out report.json

Documents go to stdout (or ``--out``), diagnostics to stderr. Exit codes:
0 success, 1 a check failed, 2 bad input, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .curvature import ricci
from .errors import LiecurvError
from .gn_family import GnSpec
from .quasi_einstein import (DiagonalTemplate, QEWitness, SolveOptions, default_rng,
                             solve_qe, verify_killing_theorem)
from .report import (TOLERANCES, _finite, build_report, frame_for, frame_section, gn_demo_report,
                     provenance, ricci_section, validation_section)
from .serialization import dumps, load_algebra

EXIT_OK, EXIT_FAILED, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3

log = logging.getLogger("liecurv")


def _floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _m_value(text):
    if text.strip().lower() in ("inf", "infinity", "+inf"):
        return math.inf
    return float(text)


def _pretty(doc, out, indent=0):
    pad = "  " * indent
    for key, value in doc.items():
        if isinstance(value, dict):
            print(f"{pad}{key}:", file=out)
            _pretty(value, out, indent + 1)
        elif isinstance(value, list) and value and isinstance(value[0], list):
            print(f"{pad}{key}:", file=out)
            for row in value:
                print(pad + "  " + " ".join(f"{v:12.6g}" if isinstance(v, float) else str(v) for v in row), file=out)
        elif isinstance(value, list) and value and isinstance(value[0], dict):
            print(f"{pad}{key}:", file=out)
            for item in value:
                print(pad + "  - " + ", ".join(f"{k}={v}" for k, v in item.items()
                                               if not isinstance(v, (list, dict))), file=out)
        elif isinstance(value, float):
            print(f"{pad}{key}: {value:.12g}", file=out)
        else:
            print(f"{pad}{key}: {value}", file=out)


def _emit(doc, args):
    doc = _finite(doc)
    out_path = getattr(args, "out", None)
    if out_path:
        Path(out_path).write_text(dumps(doc) + "\n", encoding="utf-8")
    elif getattr(args, "pretty", False):
        _pretty(doc, sys.stdout)
    else:
        print(dumps(doc))


def cmd_validate(args):
    alg, form, _ = load_algebra(args.file)
    checks = validation_section(alg, form, args.tol)
    _emit({"validation": checks}, args)
    return EXIT_OK if all(c["passed"] for c in checks) else EXIT_FAILED


def cmd_frame(args):
    alg, form, metric = load_algebra(args.file)
    if form is None:
        raise LiecurvError("frame needs an invariant form in the document", code="E_MISSING_FORM")
    _emit({"frame": frame_section(frame_for(alg, form, metric))}, args)
    return EXIT_OK


def cmd_ricci(args):
    alg, form, metric = load_algebra(args.file)
    frame = frame_for(alg, form, metric)
    if args.method == "all":
        section, S = ricci_section(frame)
        section["scalar_curvature"] = S
        _emit({"ricci": section}, args)
        return EXIT_OK if section["passed"] else EXIT_FAILED
    ric = ricci(frame, args.method)
    _emit({"ricci": {"method": args.method, "matrix": ric.matrix, "asymmetry": ric.asymmetry,
                     "scalar_curvature": float(np.trace(ric.matrix))}}, args)
    return EXIT_OK


def cmd_qe_check(args):
    alg, form, metric = load_algebra(args.file)
    frame = frame_for(alg, form, metric)
    x = np.asarray(args.x, dtype=float)
    if x.shape != (alg.dim,):
        raise LiecurvError(f"--x needs {alg.dim} coefficients", code="E_DIMENSION")
    if not args.frame_coords:
        x = frame.to_frame(x)
    ric = ricci(frame, "oracle")
    witness = QEWitness.build(frame, ric, x, args.lambda_const, args.m)
    ok, viol = verify_killing_theorem(frame, witness, TOLERANCES["killing"])
    passed = witness.residual <= args.tol
    _emit({"witness": witness.to_dict(), "x_document": frame.to_user(x), "killing": {"ok": ok, "violation": viol},
           "passed": passed}, args)
    return EXIT_OK if passed else EXIT_FAILED


def cmd_qe_solve(args):
    alg, form, metric = load_algebra(args.file)
    frame = frame_for(alg, form, metric)
    template = DiagonalTemplate(frame.basis, np.ones(alg.dim))
    opts = SolveOptions(tol=args.tol, normalize=args.normalize, killing=not args.free_x, seed=args.seed)
    results = solve_qe(alg, form, template, args.seeds, opts)
    _emit({"template_basis": frame.basis, "witnesses": [r.to_dict() for r in results],
           "provenance": provenance(seed=args.seed, seeds=args.seeds, solver_tol=args.tol)}, args)
    return EXIT_OK


def cmd_gn_demo(args):
    a = args.a if args.a is not None else [1.0] * args.n
    if len(a) != args.n:
        raise LiecurvError(f"--a has {len(a)} entries but --n is {args.n}", code="E_BAD_SPEC")
    doc = gn_demo_report(GnSpec(tuple(a)), args.lambda1, args.c)
    _emit(doc, args)
    return EXIT_OK if doc["passed"] else EXIT_FAILED


def cmd_report(args):
    alg, form, metric = load_algebra(args.file)
    doc = build_report(alg, form, metric, seeds=args.seeds, seed=args.seed, normalize=args.normalize)
    _emit(doc, args)
    checks = all(c["passed"] for c in doc["validation"]) and doc["ricci"]["passed"]
    return EXIT_OK if checks else EXIT_FAILED


def build_parser():
    p = argparse.ArgumentParser(prog="liecurv", description=__doc__.splitlines()[0] if __doc__ else None)
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, file=True):
        if file:
            sp.add_argument("file")
        sp.add_argument("--pretty", action="store_true", help="human-readable tables")
        sp.add_argument("--out", help="write the document to this path")

    sp = sub.add_parser("validate", help="Jacobi, ad-invariance and unimodularity checks")
    common(sp)
    sp.add_argument("--tol", type=float, default=TOLERANCES["axiom"])
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("frame", help="adapted orthonormal frame")
    common(sp)
    sp.set_defaults(func=cmd_frame)

    sp = sub.add_parser("ricci", help="Ricci tensor")
    common(sp)
    sp.add_argument("--method", choices=["trace", "closed", "oracle", "all"], default="all")
    sp.set_defaults(func=cmd_ricci)

    sp = sub.add_parser("qe-check", help="residual of a candidate quasi-Einstein witness")
    common(sp)
    sp.add_argument("--x", type=_floats, required=True, help="coefficients of X (document basis)")
    sp.add_argument("--frame-coords", action="store_true", help="--x is given in adapted-frame coordinates")
    sp.add_argument("--lambda", dest="lambda_const", type=float, required=True)
    sp.add_argument("--m", type=_m_value, required=True, help="positive number or inf")
    sp.add_argument("--tol", type=float, default=TOLERANCES["residual"])
    sp.set_defaults(func=cmd_qe_check)

    sp = sub.add_parser("qe-solve", help="search for quasi-Einstein metrics")
    common(sp)
    sp.add_argument("--seeds", type=int, default=8)
    sp.add_argument("--tol", type=float, default=TOLERANCES["residual"])
    sp.add_argument("--normalize", action="store_true", help="fix the metric determinant to 1")
    sp.add_argument("--free-x", action="store_true", help="do not restrict X to Killing fields")
    sp.add_argument("--seed", type=int, default=None)
    sp.set_defaults(func=cmd_qe_solve)

    sp = sub.add_parser("gn-demo", help="closed-form family point on g(n)")
    common(sp, file=False)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--a", type=_floats, default=None)
    sp.add_argument("--lambda1", type=float, required=True)
    sp.add_argument("--c", type=float, required=True)
    sp.set_defaults(func=cmd_gn_demo)

    sp = sub.add_parser("report", help="full report document")
    common(sp)
    sp.add_argument("--seeds", type=int, default=4)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--normalize", action="store_true")
    sp.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, stream=sys.stderr)
    if getattr(args, "seed", None) is None and args.command == "qe-solve":
        args.seed = int(default_rng().integers(2**31))
    try:
        return args.func(args)
    except LiecurvError as exc:
        print(json.dumps({"error": exc.to_dict()}), file=sys.stderr)
        return EXIT_INPUT
    except (np.linalg.LinAlgError, FloatingPointError, ArithmeticError) as exc:
        print(json.dumps({"error": {"code": "E_NUMERIC", "message": str(exc)}}), file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
