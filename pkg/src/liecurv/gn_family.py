"""The solvable quadratic algebras g(n) and their quasi-Einstein family.

``g(n)`` has basis ``(D, X_1, Y_1, ..., X_n, Y_n, Z)`` with
``[D, X_s] = a_s X_s``, ``[D, Y_s] = -a_s Y_s``, ``[X_s, Y_s] = Z`` and the
invariant form ``(D, Z) = 1/2``, ``(X_s, Y_s) = 1/(2 a_s)``.

Metrics are taken diagonal in the basis

    e_1 = D + Z, e_2 = D - Z,
    e_{2s+1} = sqrt(a_s) (X_s + Y_s), e_{2s+2} = sqrt(a_s) (X_s - Y_s),

with ``<e_i, e_i> = lam_i**2``. Indices below are 0-based, so ``lam[0]`` is
the coefficient of ``e_1``. Flipping the sign of any ``lam_i`` reflects a
basis vector and gives an isometric metric.

Note that ``lam`` here is a metric coefficient, not a theta eigenvalue;
see :mod:`liecurv.quad_form`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .curvature import connection_koszul, ricci_trace, scalar_curvature
from .errors import FamilyConstraintError, LiecurvError
from .lie_core import LieAlgebra
from .quad_form import AdaptedFrame, InvariantForm, Metric
from .quasi_einstein import (DiagonalTemplate, QEWitness, SolveOptions, lie_derivative_metric,
                             solve_qe)

FAMILY_TOL = 1e-8


@dataclass(frozen=True)
class GnSpec:
    a: tuple

    def __post_init__(self):
        a = tuple(float(v) for v in np.atleast_1d(self.a))
        if not a:
            raise LiecurvError("g(n) needs n >= 1", code="E_BAD_SPEC")
        if any(not math.isfinite(v) or v <= 0 for v in a):
            raise LiecurvError("all a_s must be positive", code="E_BAD_SPEC")
        if any(x > y for x, y in zip(a, a[1:])):
            raise LiecurvError("a_s must be nondecreasing", code="E_BAD_SPEC")
        object.__setattr__(self, "a", a)

    @property
    def n(self) -> int:
        return len(self.a)

    @property
    def dim(self) -> int:
        return 2 * self.n + 2

    def labels(self):
        out = ["D"]
        for s in range(1, self.n + 1):
            out += [f"X{s}", f"Y{s}"]
        return out + ["Z"]


@dataclass(frozen=True, eq=False)
class GnMetricParams:
    lam: np.ndarray

    def __post_init__(self):
        lam = np.array(self.lam, dtype=float)
        if lam.ndim != 1 or np.any(lam == 0) or not np.all(np.isfinite(lam)):
            raise LiecurvError("metric coefficients must be finite and nonzero", code="E_BAD_PARAMS")
        lam.setflags(write=False)
        object.__setattr__(self, "lam", lam)


def _params(spec, params) -> np.ndarray:
    if not isinstance(params, GnMetricParams):
        params = GnMetricParams(params)
    if params.lam.shape != (spec.dim,):
        raise LiecurvError(f"expected {spec.dim} metric coefficients", code="E_BAD_PARAMS")
    return params.lam


def build_gn(spec: GnSpec):
    N = spec.dim
    D, Z = 0, N - 1
    C = np.zeros((N, N, N))
    B = np.zeros((N, N))
    B[D, Z] = B[Z, D] = 0.5
    for s, a in enumerate(spec.a):
        X, Y = 1 + 2 * s, 2 + 2 * s
        C[D, X, X] = a
        C[D, Y, Y] = -a
        C[X, Y, Z] = 1.0
        B[X, Y] = B[Y, X] = 0.5 / a
    return LieAlgebra(C, spec.labels()), InvariantForm(B)


def gn_e_basis(spec: GnSpec) -> np.ndarray:
    """Columns are ``e_1, ..., e_{2n+2}`` written in ``(D, X_s, Y_s, Z)``."""
    N = spec.dim
    E = np.zeros((N, N))
    E[0, 0], E[N - 1, 0] = 1.0, 1.0
    E[0, 1], E[N - 1, 1] = 1.0, -1.0
    for s, a in enumerate(spec.a):
        r = math.sqrt(a)
        X, Y = 1 + 2 * s, 2 + 2 * s
        E[X, 2 + 2 * s], E[Y, 2 + 2 * s] = r, r
        E[X, 3 + 2 * s], E[Y, 3 + 2 * s] = r, -r
    return E


def gn_metric(spec: GnSpec, params) -> Metric:
    lam = _params(spec, params)
    Einv = np.linalg.inv(gn_e_basis(spec))
    return Metric(Einv.T @ np.diag(lam ** 2) @ Einv)


def gn_theta_eigenvalues(lam) -> np.ndarray:
    lam = np.asarray(lam, dtype=float)
    sign = np.where(np.arange(len(lam)) % 2 == 0, 1.0, -1.0)
    return sign / lam ** 2


def gn_frame(spec: GnSpec, params) -> AdaptedFrame:
    """Adapted frame ``f_i = e_i / lam_i`` in the order of the e-basis."""
    lam = _params(spec, params)
    alg, form = build_gn(spec)
    basis = gn_e_basis(spec) / lam[None, :]
    return AdaptedFrame(alg, form, gn_metric(spec, lam), basis, lam=gn_theta_eigenvalues(lam))


def gn_structure_closed(spec: GnSpec, params) -> np.ndarray:
    """Frame structure constants written out entry by entry."""
    lam = _params(spec, params)
    N = spec.dim
    C = np.zeros((N, N, N))

    def put(i, j, k, v):
        C[i, j, k] = v
        C[j, i, k] = -v

    l1, l2 = lam[0], lam[1]
    for s, a in enumerate(spec.a):
        p, q = 2 + 2 * s, 3 + 2 * s
        lp, lq = lam[p], lam[q]
        put(0, p, q, a * lq / (l1 * lp))
        put(1, p, q, a * lq / (l2 * lp))
        put(0, q, p, a * lp / (l1 * lq))
        put(1, q, p, a * lp / (l2 * lq))
        C[p, q, 1] = a * l2 / (lp * lq)
        C[q, p, 1] = -C[p, q, 1]
        C[p, q, 0] = -a * l1 / (lp * lq)
        C[q, p, 0] = -C[p, q, 0]
    return C


def gn_ricci_closed(spec: GnSpec, params) -> np.ndarray:
    """Ricci matrix in the f-frame from the component formulas for g(n)."""
    lam = _params(spec, params)
    N = spec.dim
    sq = lam ** 2
    l1, l2 = sq[0], sq[1]
    R = np.zeros((N, N))
    for s, a in enumerate(spec.a):
        p, q = 2 + 2 * s, 3 + 2 * s
        P, Q = sq[p], sq[q]
        a2 = a * a
        R[0, 1] += -0.5 * ((P + Q) ** 2 + l1 * l2) * a2 / (lam[0] * lam[1] * P * Q)
        R[0, 0] += -0.5 * ((P + Q) ** 2 - l1 ** 2) * a2 / (l1 * P * Q)
        R[1, 1] += -0.5 * ((P + Q) ** 2 - l2 ** 2) * a2 / (l2 * P * Q)
        R[p, p] = (-0.5 * ((l1 + Q) ** 2 - P ** 2) * a2 / (l1 * P * Q)
                   - 0.5 * ((l2 - Q) ** 2 - P ** 2) * a2 / (l2 * P * Q))
        R[q, q] = (-0.5 * ((l1 - P) ** 2 - Q ** 2) * a2 / (l1 * P * Q)
                   - 0.5 * ((l2 + P) ** 2 - Q ** 2) * a2 / (l2 * P * Q))
    R[1, 0] = R[0, 1]
    return R


def killing_field(params) -> np.ndarray:
    """The Killing field ``lam_1 f_1 - lam_2 f_2`` (central, equal to 2Z) in frame coordinates."""
    lam = np.asarray(getattr(params, "lam", params), dtype=float)
    x = np.zeros(len(lam))
    x[0], x[1] = lam[0], -lam[1]
    return x


def family_deviations(spec: GnSpec, params, normalize: bool = False) -> dict:
    """Absolute deviations from the three defining relations of the family.

    ``pairs``: ``lam_{2s+1}^2 - lam_{2s+2}^2``; ``ratios``:
    ``lam_{2i+1}^2 / a_i - lam_{2j+1}^2 / a_j``; ``product``:
    ``lam_1^2 lam_2^2 - 4 (sum a_s^2 / a_1^2) lam_3^4``. With ``normalize``
    the coefficients are first rescaled so that ``prod lam_i^2 = 1``.
    """
    lam = _params(spec, params).astype(float)
    sq = lam ** 2
    if normalize:
        sq = sq / np.exp(np.mean(np.log(sq)))
    a = np.asarray(spec.a)
    odd, even = sq[2::2], sq[3::2]
    ratios = odd / a
    prod = sq[0] * sq[1] - 4.0 * np.sum(a ** 2) / a[0] ** 2 * sq[2] ** 2
    return {
        "pairs": float(np.abs(odd - even).max()),
        "ratios": float(np.abs(ratios - ratios[0]).max()),
        "product": float(abs(prod)),
    }


def on_family(spec, params, tol=FAMILY_TOL) -> bool:
    lam = _params(spec, params)
    scale = 1.0 + float(np.max(lam ** 2)) ** 2
    dev = family_deviations(spec, lam)
    return max(dev.values()) <= tol * scale


def _ricci(frame):
    return ricci_trace(frame, connection_koszul(frame))


def qe_family_point(spec: GnSpec, lambda1: float, c: float):
    """Closed-form quasi-Einstein metric on g(n) with ``lam_1 = lambda1``, ``lam_3 = c``.

    Returns ``(GnMetricParams, QEWitness)``. X is ``lam_1 f_1 - lam_2 f_2`` and
    m is solved from the (f_1, f_2) component of the equation.
    """
    if lambda1 == 0 or c == 0:
        raise LiecurvError("lambda1 and c must be nonzero", code="E_BAD_PARAMS")
    a = np.asarray(spec.a)
    lam = np.empty(spec.dim)
    lam[0] = lambda1
    lam[1] = math.sqrt(4.0 * np.sum(a ** 2) / a[0] ** 2 * c ** 4 / lambda1 ** 2)
    for s in range(spec.n):
        v = math.copysign(math.sqrt(a[s] / a[0]) * abs(c), c)
        lam[2 + 2 * s] = lam[3 + 2 * s] = v
    lam[2] = c
    params = GnMetricParams(lam)
    frame = gn_frame(spec, params)
    # m and lambda come from the component formulas: routing them through the
    # numerical Ricci tensor amplifies its round-off by x_2^2 / m.
    closed = gn_ricci_closed(spec, params)
    r12 = closed[0, 1]
    if r12 == 0.0:
        raise FamilyConstraintError("Ric(f1, f2) vanishes; m is not finite")
    m = -lam[0] * lam[1] / r12
    if not m > 0:
        raise FamilyConstraintError(f"family point gives non-positive m = {m}")
    x = killing_field(lam)
    lambda_const = closed[0, 0] - x[0] ** 2 / m
    return params, QEWitness.build(frame, _ricci(frame), x, lambda_const, m)


def gn_scalar_curvature_closed(spec: GnSpec, params, tol: float = FAMILY_TOL) -> float:
    """Scalar curvature at a family point,

        S = -(lam_1^2 + lam_2^2) (2 sum_s a_s^2 / (lam_1^2 lam_2^2) + n a_1^2 / (2 lam_3^4)).

    Only valid on the family; raises :class:`FamilyConstraintError` elsewhere.
    """
    lam = _params(spec, params)
    if not on_family(spec, lam, tol):
        raise FamilyConstraintError("parameters are not on the quasi-Einstein family")
    a = np.asarray(spec.a)
    l1, l2, l3 = lam[0] ** 2, lam[1] ** 2, lam[2] ** 2
    return float(-(l1 + l2) * (2.0 * np.sum(a ** 2) / (l1 * l2) + spec.n * a[0] ** 2 / (2.0 * l3 ** 2)))


def gn_scalar_curvature_equal_weights(spec: GnSpec, params) -> float:
    """``-n (lam_1^2 + lam_2^2) (2 / (lam_1^2 lam_2^2) + a_1^2 / (2 lam_3^4))``.

    Coincides with :func:`gn_scalar_curvature_closed` on the family exactly
    when ``sum_s a_s^2 = n`` (e.g. all ``a_s = 1``); kept for comparison.
    """
    lam = _params(spec, params)
    l1, l2, l3 = lam[0] ** 2, lam[1] ** 2, lam[2] ** 2
    return float(-spec.n * (l1 + l2) * (2.0 / (l1 * l2) + spec.a[0] ** 2 / (2.0 * l3 ** 2)))


def non_equivalence_witness(spec: GnSpec, c: float, lambda1_list: Sequence[float]):
    """Scalar-curvature table over family points sharing ``c``.

    Each row has ``lambda1``, ``lambda2``, the determinant of the metric in
    the f-frame (always 1), ``lambda1^2 lambda2^2`` and S both from the
    closed form and from the Ricci trace.
    """
    vals = [float(v) for v in lambda1_list]
    if any(v <= 0 for v in vals):
        raise LiecurvError("lambda1 values must be positive", code="E_BAD_PARAMS")
    if len(set(vals)) != len(vals):
        raise LiecurvError("duplicate lambda1 values", code="E_DUPLICATE")
    rows = []
    for l1 in vals:
        params, witness = qe_family_point(spec, l1, c)
        frame = gn_frame(spec, params)
        gf = frame.basis.T @ frame.metric.matrix @ frame.basis
        lam = params.lam
        rows.append({
            "lambda1": l1,
            "lambda2": float(lam[1]),
            "det_metric_f": float(np.linalg.det(gf)),
            "product": float(lam[0] ** 2 * lam[1] ** 2),
            "S": gn_scalar_curvature_closed(spec, params),
            "S_trace": scalar_curvature(_ricci(frame)),
            "m": witness.m,
            "residual": witness.residual,
        })
    return rows


def gn_template(spec: GnSpec, lam0=None) -> DiagonalTemplate:
    lam0 = np.ones(spec.dim) if lam0 is None else np.asarray(lam0, dtype=float)
    return DiagonalTemplate(gn_e_basis(spec), lam0 ** 2)


def solve_gn(spec: GnSpec, seeds=8, options: Optional[SolveOptions] = None, lam0=None):
    """``solve_qe`` over metrics diagonal in the e-basis.

    Array seeds are metric coefficients ``lam`` (not squared).
    """
    alg, form = build_gn(spec)
    if not isinstance(seeds, (int, np.integer)):
        seeds = [np.asarray(s, dtype=float) ** 2 for s in seeds]
    return solve_qe(alg, form, gn_template(spec, lam0), seeds, options)


def result_lam(result) -> np.ndarray:
    """Positive metric coefficients of a solver result on the g(n) template."""
    return np.sqrt(result.params)


def family_min_residual(spec: GnSpec, params) -> float:
    """Smallest quasi-Einstein residual over (lambda, m) with X = lam_1 f_1 - lam_2 f_2."""
    lam = _params(spec, params)
    frame = gn_frame(spec, lam)
    conn = connection_koszul(frame)
    ric = ricci_trace(frame, conn)
    x = killing_field(lam)
    base = ric.matrix + 0.5 * lie_derivative_metric(frame, x, conn)
    N = spec.dim
    A = np.stack([np.eye(N).ravel(), np.outer(x, x).ravel()], axis=1)
    coef, *_ = np.linalg.lstsq(A, base.ravel(), rcond=None)
    return float(np.linalg.norm(base.ravel() - A @ coef))
