"""Levi-Civita connection and Ricci curvature of left-invariant metrics.

Everything is computed in a metric-orthonormal frame. Conventions:

* ``gamma[i, j, k]`` is the k-th component of ``nabla_{X_i} X_j``.
* ``R(X, Y) Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z`` and
  ``Ric(Y, Z) = sum_i <R(X_i, Y) Z, X_i>``. With this choice so(3) with
  unit structure constants and the identity metric has ``Ric = I / 2``.

Three Ricci routes are provided: the trace formula
``Ric(X, Y) = -tr (nabla_X - ad X)(nabla_Y - ad Y)`` (unimodular only), the
closed sum over theta-eigenvalues (adapted frames only), and a brute-force
curvature-tensor contraction used as the reference.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import LiecurvError, NotUnimodularError
from .lie_core import LieAlgebra
from .quad_form import AdaptedFrame, InvariantForm, Metric, OrthonormalFrame, adapted_frame

DEFAULT_STEP = 1e-5


@dataclass(frozen=True, eq=False)
class Connection:
    gamma: np.ndarray

    def operators(self) -> np.ndarray:
        """Stack of matrices ``N[i]`` with ``N[i] @ y = nabla_{X_i} y``."""
        return np.transpose(self.gamma, (0, 2, 1))

    def metric_error(self) -> float:
        return float(np.abs(self.gamma + self.gamma.transpose(0, 2, 1)).max())

    def torsion_error(self, structure) -> float:
        T = self.gamma - self.gamma.transpose(1, 0, 2) - structure
        return float(np.abs(T).max())


@dataclass(frozen=True, eq=False)
class RicciTensor:
    matrix: np.ndarray
    method: str = ""
    asymmetry: float = 0.0

    @property
    def dim(self):
        return self.matrix.shape[0]


def relative_deviation(a, b) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    diff = np.abs(a - b).max(initial=0.0)
    scale = max(np.abs(a).max(initial=0.0), np.abs(b).max(initial=0.0))
    if diff == 0.0:
        return 0.0
    return float(diff / scale)


def _require_unimodular(frame: OrthonormalFrame, what: str):
    ok, worst = frame.is_unimodular()
    if not ok:
        raise NotUnimodularError(
            f"{what} needs a unimodular algebra (max |tr ad| = {worst:.3g}); use ricci_oracle"
        )


def connection_koszul(frame: OrthonormalFrame) -> Connection:
    C = frame.structure
    gamma = 0.5 * (C - np.einsum("jki->ijk", C) + np.einsum("kij->ijk", C))
    return Connection(gamma)


def connection_theta(frame: AdaptedFrame) -> Connection:
    """Connection from the theta-eigenvalue weights ``(mu_l - mu_i + mu_j) / mu_l``."""
    if not isinstance(frame, AdaptedFrame):
        raise LiecurvError("connection_theta needs an AdaptedFrame")
    mu = frame.mu
    w = (mu[None, None, :] - mu[:, None, None] + mu[None, :, None]) / mu[None, None, :]
    return Connection(0.5 * w * frame.structure)


def _ad_operators(structure) -> np.ndarray:
    # A[i][k, j] = C_ij^k
    return np.transpose(structure, (0, 2, 1))


def ricci_trace(frame: OrthonormalFrame, connection: Optional[Connection] = None) -> RicciTensor:
    _require_unimodular(frame, "the trace formula")
    if connection is None:
        connection = connection_koszul(frame)
    A = connection.operators() - _ad_operators(frame.structure)
    M = -np.einsum("jab,kba->jk", A, A)
    asym = float(np.abs(M - M.T).max())
    return RicciTensor(0.5 * (M + M.T), "trace", asym)


def ricci_closed_form(frame: AdaptedFrame) -> RicciTensor:
    """Ric(X_j, X_k) = -1/2 sum_{i<l} ((mu_l - mu_i)^2 - mu_k mu_j) C_ki^l C_ji^l / mu_l^2."""
    if not isinstance(frame, AdaptedFrame):
        raise LiecurvError("the closed form needs an AdaptedFrame")
    _require_unimodular(frame, "the closed form")
    C, mu = frame.structure, frame.mu
    n = len(mu)
    upper = np.triu(np.ones((n, n)), k=1)
    inv_sq = upper / mu[None, :] ** 2
    diff_sq = (mu[None, :] - mu[:, None]) ** 2 * inv_sq
    first = np.einsum("il,kil,jil->jk", diff_sq, C, C)
    second = np.einsum("il,kil,jil->jk", inv_sq, C, C) * np.outer(mu, mu)
    M = -0.5 * (first - second)
    return RicciTensor(0.5 * (M + M.T), "closed", float(np.abs(M - M.T).max()))


def curvature_tensor(frame: OrthonormalFrame, connection: Connection) -> np.ndarray:
    """``R[a, b]`` is the matrix of ``R(X_a, X_b)``."""
    N = connection.operators()
    NN = np.einsum("aij,bjk->abik", N, N)
    return NN - NN.transpose(1, 0, 2, 3) - np.einsum("abc,cik->abik", frame.structure, N)


def ricci_oracle(frame: OrthonormalFrame, connection: Optional[Connection] = None) -> RicciTensor:
    if connection is None:
        connection = connection_koszul(frame)
    R = curvature_tensor(frame, connection)
    M = np.einsum("abac->bc", R)
    return RicciTensor(0.5 * (M + M.T), "oracle", float(np.abs(M - M.T).max()))


def scalar_curvature(ric: RicciTensor) -> float:
    return float(np.trace(ric.matrix))


def ricci(frame: OrthonormalFrame, method: str = "oracle") -> RicciTensor:
    if method == "trace":
        return ricci_trace(frame)
    if method == "closed":
        return ricci_closed_form(frame)
    if method == "oracle":
        return ricci_oracle(frame)
    raise LiecurvError(f"unknown Ricci method {method!r}")


def ricci_all(frame: AdaptedFrame):
    """All three Ricci routes plus their pairwise relative deviations."""
    conn = connection_koszul(frame)
    out = {
        "trace": ricci_trace(frame, conn),
        "closed": ricci_closed_form(frame),
        "oracle": ricci_oracle(frame, conn),
    }
    names = list(out)
    devs = {}
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            devs[f"{a}-{b}"] = relative_deviation(out[a].matrix, out[b].matrix)
    return out, devs


def _scalar_of_metric(alg: LieAlgebra, metric: Metric) -> float:
    frame = OrthonormalFrame.from_metric(alg, metric)
    return scalar_curvature(ricci_oracle(frame))


def grad_sc_check(alg: LieAlgebra, metric: Metric, perturbation, h: float = DEFAULT_STEP,
                  form: Optional[InvariantForm] = None):
    """Compare d/dt sc(g + t v) at t = 0 with ``-(ric_g, v)_g``.

    Returns ``(lhs, rhs, gap)`` where ``lhs`` is a central difference with
    step ``h``. The identity holds for unimodular algebras. If ``form`` is
    given the Ricci tensor on the right-hand side is taken in the adapted
    frame, otherwise in the Cholesky frame of ``metric``.
    """
    v = np.array(perturbation, dtype=float)
    if v.shape != (alg.dim, alg.dim):
        raise LiecurvError("perturbation must be an n x n matrix", code="E_DIMENSION")
    v = 0.5 * (v + v.T)
    plus = Metric(metric.matrix + h * v)
    minus = Metric(metric.matrix - h * v)
    lhs = (_scalar_of_metric(alg, plus) - _scalar_of_metric(alg, minus)) / (2.0 * h)
    if form is not None:
        frame = adapted_frame(alg, form, metric)
    else:
        frame = OrthonormalFrame.from_metric(alg, metric)
    ric = ricci_oracle(frame).matrix
    v_frame = frame.basis.T @ v @ frame.basis
    rhs = -float(np.sum(ric * v_frame))
    return lhs, rhs, abs(lhs - rhs)
