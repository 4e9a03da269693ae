"""Assembly of report documents for the CLI."""
from __future__ import annotations

import math
from typing import Optional

import numpy as np

from . import __version__
from .curvature import (connection_koszul, connection_theta, relative_deviation, ricci_all,
                        ricci_oracle, scalar_curvature)
from .gn_family import (GnSpec, build_gn, family_deviations, gn_frame,
                        gn_scalar_curvature_closed, gn_scalar_curvature_equal_weights, qe_family_point)
from .lie_core import LieAlgebra, unimodularity_report, validate_jacobi
from .quad_form import InvariantForm, Metric, OrthonormalFrame, adapted_frame, check_ad_invariance
from .quasi_einstein import DiagonalTemplate, SolveOptions, solve_qe, verify_killing_theorem
from .serialization import algebra_document

TOLERANCES = {
    "axiom": 1e-10,
    "ricci_agreement": 1e-9,
    "residual": 1e-10,
    "killing": 1e-8,
}


def _finite(obj):
    """Recursively convert numpy values and check every number is finite."""
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _finite(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        if not math.isfinite(v):
            raise FloatingPointError("non-finite value in report")
        return v + 0.0  # drop negative zeros
    return obj


def validation_section(alg: LieAlgebra, form: Optional[InvariantForm], tol=TOLERANCES["axiom"]):
    checks = [validate_jacobi(alg, tol), unimodularity_report(alg, tol)]
    if form is not None:
        checks.append(check_ad_invariance(alg, form, tol))
    return [c.to_dict() for c in checks]


def frame_for(alg, form, metric):
    metric = metric if metric is not None else Metric.identity(alg.dim)
    if form is not None:
        return adapted_frame(alg, form, metric)
    return OrthonormalFrame.from_metric(alg, metric)


def frame_section(frame):
    out = {"basis": frame.basis}
    if hasattr(frame, "lam"):
        out["lambda"] = frame.lam
    return out


def ricci_section(frame, tol=TOLERANCES["ricci_agreement"]):
    unimodular = frame.is_unimodular()[0]
    if hasattr(frame, "lam") and unimodular:
        mats, devs = ricci_all(frame)
        conn_dev = relative_deviation(connection_koszul(frame).gamma, connection_theta(frame).gamma)
        out = {
            "matrices": {k: v.matrix for k, v in mats.items()},
            "deviations": devs,
            "connection_deviation": conn_dev,
            "passed": bool(max(list(devs.values()) + [conn_dev]) <= tol),
            "asymmetry_trace": mats["trace"].asymmetry,
        }
        S = scalar_curvature(mats["oracle"])
    else:
        ric = ricci_oracle(frame)
        out = {"matrices": {"oracle": ric.matrix}, "deviations": {}, "passed": True,
               "note": "only the curvature-tensor route applies (no invariant form or not unimodular)"}
        S = scalar_curvature(ric)
    return out, S


def witness_section(frame, results):
    rows = []
    for r in results:
        d = r.to_dict()
        rows.append(d)
    return rows


def build_report(alg: LieAlgebra, form=None, metric=None, *, seeds=4, seed=0, tol=TOLERANCES["residual"],
                 normalize=False):
    frame = frame_for(alg, form, metric)
    ricci, S = ricci_section(frame)
    template = DiagonalTemplate(frame.basis, np.ones(alg.dim))
    opts = SolveOptions(tol=tol, normalize=normalize, seed=seed)
    results = solve_qe(alg, form, template, seeds, opts) if seeds else []
    doc = {
        "input": algebra_document(alg, form, metric),
        "validation": validation_section(alg, form),
        "frame": frame_section(frame),
        "ricci": ricci,
        "scalar_curvature": S,
        "witnesses": witness_section(frame, results),
        "provenance": provenance(seed=seed, solver_tol=tol, seeds=seeds),
    }
    return _finite(doc)


def provenance(**extra):
    out = {"version": __version__, "tolerances": dict(TOLERANCES)}
    out.update(extra)
    return out


def gn_demo_report(spec: GnSpec, lambda1: float, c: float):
    params, witness = qe_family_point(spec, lambda1, c)
    frame = gn_frame(spec, params)
    alg, form = build_gn(spec)
    ricci, S = ricci_section(frame)
    ok, viol = verify_killing_theorem(frame, witness, TOLERANCES["killing"])
    doc = {
        "input": {"n": spec.n, "a": list(spec.a), "lambda1": lambda1, "c": c},
        "validation": validation_section(alg, form, 1e-12),
        "params": params.lam,
        "frame": frame_section(frame),
        "ricci": ricci,
        "witness": witness.to_dict(),
        "killing": {"ok": ok, "violation": viol},
        "family_equations": family_deviations(spec, params),
        "scalar_curvature": {
            "trace": S,
            "closed_form": gn_scalar_curvature_closed(spec, params),
            "equal_weights_form": gn_scalar_curvature_equal_weights(spec, params),
        },
        "provenance": provenance(),
    }
    doc["passed"] = bool(witness.residual <= TOLERANCES["residual"] and ok and ricci["passed"])
    return _finite(doc)
