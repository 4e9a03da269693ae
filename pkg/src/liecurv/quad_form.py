"""Invariant bilinear forms, left-invariant metrics, and orthonormal frames.

Two different "lambda" arrays show up in this package. ``AdaptedFrame.lam``
holds the eigenvalues of the theta-map, i.e. ``(X_i, X_i)`` for a
metric-orthonormal frame. ``GnMetricParams.lam`` in :mod:`liecurv.gn_family`
holds metric coefficients with ``<e_i, e_i> = lam_i**2``. On G(n) they are
related by ``theta-eigenvalue = +-1 / lam_i**2``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateFormError, DimensionError, LiecurvError, NotPositiveDefiniteError
from .lie_core import LieAlgebra, ValidationReport

SYMMETRY_RTOL = 1e-12
DEGENERACY_RTOL = 1e-12


def _square(matrix, what):
    M = np.array(matrix, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionError(f"{what} must be a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise LiecurvError(f"{what} has non-finite entries", code="E_NONFINITE")
    scale = 1.0 + np.abs(M).max(initial=0.0)
    if np.abs(M - M.T).max(initial=0.0) > SYMMETRY_RTOL * scale:
        raise LiecurvError(f"{what} is not symmetric", code="E_ASYMMETRIC")
    if not np.array_equal(M, M.T):
        M = 0.5 * M + 0.5 * M.T
    M.setflags(write=False)
    return M


@dataclass(frozen=True, eq=False)
class InvariantForm:
    """Symmetric bilinear form ``B[i, j] = (e_i, e_j)``; may be indefinite."""

    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", _square(self.matrix, "invariant form"))

    @property
    def dim(self):
        return self.matrix.shape[0]


@dataclass(frozen=True, eq=False)
class Metric:
    """Positive-definite inner product ``g[i, j] = <e_i, e_j>`` on the algebra."""

    matrix: np.ndarray
    _chol: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        g = _square(self.matrix, "metric")
        try:
            L = np.linalg.cholesky(g)
        except np.linalg.LinAlgError:
            raise NotPositiveDefiniteError("metric is not positive definite") from None
        object.__setattr__(self, "matrix", g)
        object.__setattr__(self, "_chol", L)

    @property
    def dim(self):
        return self.matrix.shape[0]

    @classmethod
    def identity(cls, n):
        return cls(np.eye(n))

    def orthonormal_basis(self) -> np.ndarray:
        """Columns form a g-orthonormal basis (inverse transpose Cholesky factor)."""
        n = self.dim
        return np.linalg.solve(self._chol.T, np.eye(n))


def check_ad_invariance(alg: LieAlgebra, form: InvariantForm, tol: float = 1e-10) -> ValidationReport:
    if form.dim != alg.dim:
        raise DimensionError("form and algebra dimensions differ")
    C, B = alg.structure, form.matrix
    # ([e_i,e_j], e_k) + (e_j, [e_i,e_k])
    T = np.einsum("ijl,lk->ijk", C, B)
    V = T + T.transpose(0, 2, 1)
    scale = (1.0 + alg.max_abs_constant()) * (1.0 + np.abs(B).max())
    return ValidationReport("ad_invariance", float(np.abs(V).max()), tol * scale)


def _check_nondegenerate(B):
    s = np.linalg.svd(B, compute_uv=False)
    if s[0] == 0.0 or s[-1] < DEGENERACY_RTOL * s[0]:
        raise DegenerateFormError("invariant form is degenerate, theta is not invertible")


def theta_map(form: InvariantForm, metric: Metric) -> np.ndarray:
    """The operator with ``(X, Y) = <X, theta Y>``, i.e. ``g^{-1} B``."""
    if form.dim != metric.dim:
        raise DimensionError("form and metric dimensions differ")
    _check_nondegenerate(form.matrix)
    return np.linalg.solve(metric.matrix, form.matrix)


class OrthonormalFrame:
    """A metric-orthonormal basis together with the structure constants in it.

    ``basis`` has the frame vectors as columns, written in the algebra's
    original basis. ``structure[i, j, k]`` is the frame constant C_ij^k.
    """

    def __init__(self, alg: LieAlgebra, metric: Metric, basis):
        P = np.array(basis, dtype=float)
        if P.shape != (alg.dim, alg.dim) or metric.dim != alg.dim:
            raise DimensionError("basis, metric and algebra dimensions must agree")
        self.algebra = alg
        self.metric = metric
        self.basis = P
        self.inverse = P.T @ metric.matrix
        C = np.tensordot(P, alg.structure, axes=(0, 0))
        C = np.tensordot(P, C, axes=(0, 1)).transpose(1, 0, 2)
        C = C @ self.inverse.T
        # re-mirror to keep exact antisymmetry after round-off
        C = 0.5 * (C - C.transpose(1, 0, 2))
        self.structure = C
        for a in (self.basis, self.inverse, self.structure):
            a.setflags(write=False)

    @classmethod
    def from_metric(cls, alg: LieAlgebra, metric: Metric) -> "OrthonormalFrame":
        return cls(alg, metric, metric.orthonormal_basis())

    @property
    def dim(self):
        return self.basis.shape[0]

    def orthonormality_error(self) -> float:
        G = self.basis.T @ self.metric.matrix @ self.basis
        return float(np.abs(G - np.eye(self.dim)).max())

    def to_frame(self, x) -> np.ndarray:
        """Coordinates of a user-basis vector in the frame."""
        return self.inverse @ np.asarray(x, dtype=float)

    def to_user(self, x) -> np.ndarray:
        return self.basis @ np.asarray(x, dtype=float)

    def bilinear_to_user(self, T) -> np.ndarray:
        """Express a frame-coordinate bilinear form in the original basis."""
        return self.inverse.T @ np.asarray(T) @ self.inverse

    def is_unimodular(self, tol=1e-10):
        traces = np.einsum("ijj->i", self.structure)
        worst = float(np.abs(traces).max())
        return worst <= tol * (1.0 + np.abs(self.structure).max()), worst


class AdaptedFrame(OrthonormalFrame):
    """Orthonormal frame that also diagonalizes the invariant form.

    ``lam[i] = (X_i, X_i)`` are the theta eigenvalues and ``mu = 1 / lam``.
    """

    def __init__(self, alg: LieAlgebra, form: InvariantForm, metric: Metric, basis, lam=None):
        super().__init__(alg, metric, basis)
        self.form = form
        if lam is None:
            lam = np.diag(self.basis.T @ form.matrix @ self.basis)
        lam = np.array(lam, dtype=float)
        if np.any(lam == 0.0):
            raise DegenerateFormError("zero theta eigenvalue")
        self.lam = lam
        self.mu = 1.0 / lam
        self.lam.setflags(write=False)
        self.mu.setflags(write=False)

    def diagonalization_error(self) -> float:
        D = self.basis.T @ self.form.matrix @ self.basis
        return float(np.abs(D - np.diag(self.lam)).max())

    def symmetry_error(self) -> float:
        """Max relative violation of ``C_ij^l lam_l = C_jl^i lam_i = C_li^j lam_j``."""
        C, lam = self.structure, self.lam
        A = C * lam[None, None, :]  # C_ij^l lam_l  indexed [i, j, l]
        B = np.einsum("jli->ijl", C) * lam[:, None, None]
        Cc = np.einsum("lij->ijl", C) * lam[None, :, None]
        scale = 1.0 + np.abs(A).max()
        return float(max(np.abs(A - B).max(), np.abs(A - Cc).max()) / scale)

    def theta_in_frame(self) -> np.ndarray:
        th = theta_map(self.form, self.metric)
        return self.inverse @ th @ self.basis


def _order_columns(vals, vecs, rtol=1e-10):
    """Descending eigenvalues; numerically equal values are ordered by the
    original-basis index of each vector's largest coefficient, and signs
    are fixed so that coefficient is positive."""
    n = len(vals)
    scale = max(np.abs(vals).max(), 1.0)
    lead = np.argmax(np.abs(vecs), axis=0)
    for j in range(n):
        if vecs[lead[j], j] < 0:
            vecs[:, j] = -vecs[:, j]
    order = sorted(range(n), key=lambda j: -vals[j])
    # bucket nearly-equal eigenvalues, then tie-break
    groups, cur = [], [order[0]]
    for j in order[1:]:
        if abs(vals[j] - vals[cur[0]]) <= rtol * scale:
            cur.append(j)
        else:
            groups.append(cur)
            cur = [j]
    groups.append(cur)
    final = [j for g in groups for j in sorted(g, key=lambda j: lead[j])]
    return vals[final], vecs[:, final]


def adapted_frame(alg: LieAlgebra, form: InvariantForm, metric: Metric, tol: float = DEGENERACY_RTOL) -> AdaptedFrame:
    if not (alg.dim == form.dim == metric.dim):
        raise DimensionError("algebra, form and metric dimensions differ")
    _check_nondegenerate(form.matrix)
    W = metric.orthonormal_basis()
    S = W.T @ form.matrix @ W
    vals, V = np.linalg.eigh(0.5 * (S + S.T))
    if np.any(np.abs(vals) < tol * np.abs(vals).max()):
        raise DegenerateFormError("theta has a (numerically) zero eigenvalue")
    vals, P = _order_columns(vals, W @ V)
    return AdaptedFrame(alg, form, metric, P, lam=vals)
