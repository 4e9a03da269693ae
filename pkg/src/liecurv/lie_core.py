"""Real Lie algebras given by structure constants.

The bracket of basis vectors is ``[e_i, e_j] = sum_k C[i, j, k] e_k``.
Only the ``i < j`` half of the tensor is read at construction; the rest is
mirrored, so antisymmetry holds by representation rather than by check.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DimensionError, LiecurvError


@dataclass(frozen=True)
class ValidationReport:
    name: str
    violation: float
    threshold: float

    @property
    def passed(self) -> bool:
        return bool(self.violation <= self.threshold)

    def to_dict(self):
        return {
            "check": self.name,
            "violation": float(self.violation),
            "threshold": float(self.threshold),
            "passed": self.passed,
        }


class LieAlgebra:
    """Finite-dimensional real Lie algebra.

    Parameters
    ----------
    structure : array_like, shape (n, n, n)
        Structure constants. Entries with ``i >= j`` are ignored and
        rebuilt as ``C[j, i] = -C[i, j]``, ``C[i, i] = 0``.
    labels : sequence of str, optional
        Names of the basis vectors, used only in reports.
    """

    def __init__(self, structure, labels: Optional[Sequence[str]] = None):
        C = np.array(structure, dtype=float)
        if C.ndim != 3 or not (C.shape[0] == C.shape[1] == C.shape[2]):
            raise DimensionError(f"structure constants must have shape (n, n, n), got {C.shape}")
        if C.shape[0] < 1:
            raise DimensionError("dimension must be positive")
        if not np.all(np.isfinite(C)):
            raise LiecurvError("structure constants must be finite", code="E_NONFINITE")
        upper = np.triu(np.ones(C.shape[:2], dtype=bool), k=1)
        C = C * upper[:, :, None]
        C = C - C.transpose(1, 0, 2)
        C.setflags(write=False)
        self._C = C
        if labels is not None:
            labels = tuple(str(s) for s in labels)
            if len(labels) != C.shape[0]:
                raise DimensionError("number of labels does not match dimension")
        self.labels = labels

    @classmethod
    def from_brackets(cls, dim: int, brackets, labels=None) -> "LieAlgebra":
        """Build from records ``(i, j, k, c)`` meaning ``C_ij^k = c``, 0-based, i < j."""
        C = np.zeros((dim, dim, dim))
        for i, j, k, c in brackets:
            if not i < j:
                raise LiecurvError(f"bracket record needs i < j, got ({i}, {j})", code="E_ORDER")
            C[i, j, k] += c
        return cls(C, labels)

    @classmethod
    def abelian(cls, dim: int) -> "LieAlgebra":
        return cls(np.zeros((dim, dim, dim)))

    @property
    def dim(self) -> int:
        return self._C.shape[0]

    @property
    def structure(self) -> np.ndarray:
        return self._C

    def basis_vector(self, i: int) -> np.ndarray:
        e = np.zeros(self.dim)
        e[i] = 1.0
        return e

    def max_abs_constant(self) -> float:
        return float(np.abs(self._C).max())

    def nonzero_brackets(self):
        """Sparse ``(i, j, k, c)`` list with ``i < j`` (0-based)."""
        out = []
        n = self.dim
        for i in range(n):
            for j in range(i + 1, n):
                for k in range(n):
                    c = self._C[i, j, k]
                    if c != 0.0:
                        out.append((i, j, k, float(c)))
        return out

    def __eq__(self, other):
        if not isinstance(other, LieAlgebra):
            return NotImplemented
        return self.labels == other.labels and np.array_equal(self._C, other._C)

    def __hash__(self):
        return hash((self._C.tobytes(), self.labels))

    def __repr__(self):
        return f"LieAlgebra(dim={self.dim}, nonzero={len(self.nonzero_brackets())})"


def _as_vector(alg: LieAlgebra, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (alg.dim,):
        raise DimensionError(f"expected a vector of length {alg.dim}, got shape {x.shape}")
    return x


def bracket(alg: LieAlgebra, x, y) -> np.ndarray:
    x = _as_vector(alg, x)
    y = _as_vector(alg, y)
    # antisymmetrized so that bracket(x, x) is exactly zero
    P = np.outer(x, y)
    P = P - P.T
    return 0.5 * np.einsum("ij,ijk->k", P, alg.structure)


def ad_matrix(alg: LieAlgebra, x) -> np.ndarray:
    """Matrix of ``ad x``; column j is ``[x, e_j]``."""
    x = _as_vector(alg, x)
    return np.einsum("i,ijk->kj", x, alg.structure)


def jacobi_violation(C: np.ndarray) -> float:
    # [[e_i,e_j],e_k] component m = sum_l C_ij^l C_lk^m
    T = np.einsum("ijl,lkm->ijkm", C, C)
    J = T + T.transpose(1, 2, 0, 3) + T.transpose(2, 0, 1, 3)
    return float(np.abs(J).max()) if J.size else 0.0


def validate_jacobi(alg: LieAlgebra, tol: float = 1e-10) -> ValidationReport:
    if tol <= 0:
        raise LiecurvError("tol must be positive")
    scale = (1.0 + alg.max_abs_constant()) ** 2
    return ValidationReport("jacobi", jacobi_violation(alg.structure), tol * scale)


def is_unimodular(alg: LieAlgebra, tol: float = 1e-10):
    """Return ``(ok, max_i |tr ad e_i|)``."""
    if tol <= 0:
        raise LiecurvError("tol must be positive")
    traces = np.einsum("ijj->i", alg.structure)
    worst = float(np.abs(traces).max())
    return worst <= tol * (1.0 + alg.max_abs_constant()), worst


def unimodularity_report(alg: LieAlgebra, tol: float = 1e-10) -> ValidationReport:
    _, worst = is_unimodular(alg, tol)
    return ValidationReport("unimodular", worst, tol * (1.0 + alg.max_abs_constant()))


def derived_algebra_dim(alg: LieAlgebra, rtol: float = 1e-10) -> int:
    """Dimension of the span of all brackets of basis vectors."""
    n = alg.dim
    M = alg.structure.reshape(n * n, n)
    if not M.any():
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    return int(np.sum(s > rtol * s[0]))


def so3() -> LieAlgebra:
    """``[e1, e2] = e3`` and cyclic."""
    return LieAlgebra.from_brackets(3, [(0, 1, 2, 1.0), (1, 2, 0, 1.0), (0, 2, 1, -1.0)])
