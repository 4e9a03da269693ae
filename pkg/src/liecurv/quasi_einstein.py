"""m-quasi-Einstein tensors for left-invariant vector fields.

All vectors and tensors here are in frame coordinates of an
:class:`~liecurv.quad_form.OrthonormalFrame`, so the metric is the identity
and ``X^*`` has the same coordinates as ``X``.
"""
from __future__ import annotations

import logging
import math
import os
from dataclasses import dataclass
from typing import List, Optional

import numpy as np
from scipy.optimize import least_squares

from .curvature import Connection, RicciTensor, connection_koszul, ricci_oracle, ricci_trace
from .errors import DimensionError, LiecurvError
from .lie_core import LieAlgebra
from .quad_form import InvariantForm, Metric, OrthonormalFrame

log = logging.getLogger(__name__)

SEED_ENV = "LIECURV_SEED"


def _check_m(m) -> float:
    m = float(m)
    if math.isnan(m) or m <= 0:
        raise LiecurvError(f"m must be positive or infinite, got {m}", code="E_BAD_M")
    return m


def _frame_vector(frame, x):
    x = np.asarray(x, dtype=float)
    if x.shape != (frame.dim,):
        raise DimensionError(f"expected a vector of length {frame.dim}")
    return x


def lie_derivative_metric(frame: OrthonormalFrame, x, connection: Optional[Connection] = None) -> np.ndarray:
    """``(L_X g)(Y, Z) = <nabla_Y X, Z> + <Y, nabla_Z X>``."""
    x = _frame_vector(frame, x)
    if connection is None:
        connection = connection_koszul(frame)
    # column i is nabla_{X_i} X
    L = np.einsum("j,ijk->ki", x, connection.gamma)
    return L + L.T


def sym_ad(frame: OrthonormalFrame, x) -> np.ndarray:
    """Symmetric part ``(ad X + (ad X)^t) / 2``; the adjoint is the transpose in an orthonormal frame."""
    x = _frame_vector(frame, x)
    A = np.einsum("i,ijk->kj", x, frame.structure)
    return 0.5 * (A + A.T)


def _sym_ad_map(frame) -> np.ndarray:
    n = frame.dim
    iu = np.triu_indices(n)
    cols = [sym_ad(frame, np.eye(n)[i])[iu] for i in range(n)]
    return np.stack(cols, axis=1)


def killing_subspace(frame: OrthonormalFrame, tol: float = 1e-10) -> List[np.ndarray]:
    """Orthonormal basis (frame coordinates) of the left-invariant Killing fields."""
    K = _sym_ad_map(frame)
    _, s, Vt = np.linalg.svd(K)
    if s[0] == 0.0:
        return [row.copy() for row in np.eye(frame.dim)]
    s_full = np.zeros(frame.dim)
    s_full[: len(s)] = s
    return [Vt[i].copy() for i in range(frame.dim) if s_full[i] < tol * s[0]]


def ric_m_X(frame: OrthonormalFrame, ric: RicciTensor, x, m, connection: Optional[Connection] = None) -> np.ndarray:
    """``Ric + L_X g / 2 - X^* (x) X^* / m``; the last term is dropped for m = inf."""
    m = _check_m(m)
    x = _frame_vector(frame, x)
    out = ric.matrix + 0.5 * lie_derivative_metric(frame, x, connection)
    if math.isfinite(m):
        out = out - np.outer(x, x) / m
    return out


def qe_residual(frame: OrthonormalFrame, ric: RicciTensor, x, lambda_const, m,
                connection: Optional[Connection] = None) -> float:
    T = ric_m_X(frame, ric, x, m, connection)
    return float(np.linalg.norm(T - lambda_const * np.eye(frame.dim)))


@dataclass(frozen=True, eq=False)
class QEWitness:
    x: np.ndarray
    lambda_const: float
    m: float
    residual: float

    def __post_init__(self):
        _check_m(self.m)
        if not self.residual >= 0:
            raise LiecurvError("residual must be nonnegative")

    @classmethod
    def build(cls, frame, ric, x, lambda_const, m):
        x = np.array(x, dtype=float)
        return cls(x, float(lambda_const), float(m), qe_residual(frame, ric, x, lambda_const, m))

    def to_dict(self):
        return {
            "x": [float(v) for v in self.x],
            "lambda_const": self.lambda_const,
            "m": "inf" if math.isinf(self.m) else self.m,
            "residual": self.residual,
        }


def verify_killing_theorem(frame: OrthonormalFrame, witness: QEWitness, tol: float = 1e-8):
    """Return ``(ok, |sym_ad(x)|_inf)`` with ``ok`` iff the norm is at most ``tol (1 + |x|)``."""
    worst = float(np.abs(sym_ad(frame, witness.x)).max())
    return worst <= tol * (1.0 + float(np.linalg.norm(witness.x))), worst


# --- numerical search -------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DiagonalTemplate:
    """Metrics ``<e_i, e_j> = delta_ij p_i`` in a fixed basis ``e`` (columns of ``basis``).

    ``free`` marks the coefficients the solver may move; the others stay at
    ``initial``.
    """

    basis: np.ndarray
    initial: np.ndarray
    free: Optional[np.ndarray] = None

    def __post_init__(self):
        E = np.array(self.basis, dtype=float)
        p = np.array(self.initial, dtype=float)
        if E.ndim != 2 or E.shape[0] != E.shape[1] or p.shape != (E.shape[0],):
            raise DimensionError("template basis must be n x n and initial must have length n")
        if np.any(~np.isfinite(p)) or np.any(p <= 0):
            from .errors import NotPositiveDefiniteError

            raise NotPositiveDefiniteError("template coefficients must be positive")
        free = np.ones(len(p), bool) if self.free is None else np.asarray(self.free, bool)
        object.__setattr__(self, "basis", E)
        object.__setattr__(self, "initial", p)
        object.__setattr__(self, "free", free)

    @property
    def dim(self):
        return self.basis.shape[0]

    def frame(self, alg: LieAlgebra, p) -> OrthonormalFrame:
        p = np.asarray(p, dtype=float)
        Einv = np.linalg.inv(self.basis)
        g = Einv.T @ np.diag(p) @ Einv
        return OrthonormalFrame(alg, Metric(g), self.basis / np.sqrt(p)[None, :])

    def full(self, free_values) -> np.ndarray:
        p = self.initial.copy()
        p[self.free] = free_values
        return p


@dataclass
class SolveOptions:
    tol: float = 1e-10
    normalize: bool = False
    killing: bool = True
    max_nfev: int = 2000
    dedup: float = 1e-6
    seed: Optional[int] = None
    spread: float = 1.0


@dataclass(eq=False)
class SolveResult:
    params: np.ndarray
    frame: OrthonormalFrame
    witness: QEWitness
    killing_ok: bool
    killing_violation: float
    nfev: int = 0

    def to_dict(self):
        d = self.witness.to_dict()
        d.update(
            params=[float(v) for v in self.params],
            killing_ok=self.killing_ok,
            killing_violation=self.killing_violation,
        )
        return d


def default_rng(seed=None) -> np.random.Generator:
    if seed is None:
        env = os.environ.get(SEED_ENV)
        seed = int(env) if env else None
    return np.random.default_rng(seed)


def _ricci_for(frame, conn, unimodular):
    return ricci_trace(frame, conn) if unimodular else ricci_oracle(frame, conn)


class _Problem:
    def __init__(self, alg, template, killing_user, options, unimodular):
        self.alg = alg
        self.template = template
        self.K = killing_user  # n x r, user coordinates, or None for free x
        self.options = options
        self.unimodular = unimodular
        n = alg.dim
        self.nfree = int(template.free.sum())
        if self.K is None:
            self.nx = n
        elif self.K.shape[1] == 1:
            self.nx = 0  # coefficient pinned to 1; 1/m carries the scale
        else:
            self.nx = self.K.shape[1]
        self.use_u = self.K is None or self.K.shape[1] > 0
        self.iu = np.triu_indices(n)
        w = np.where(self.iu[0] == self.iu[1], 1.0, math.sqrt(2.0))
        self.weights = w

    def unpack(self, z):
        k = self.nfree
        logp = z[:k]
        xc = z[k: k + self.nx]
        lam = z[k + self.nx]
        u = z[k + self.nx + 1] if self.use_u else 0.0
        return logp, xc, lam, u

    def x_user(self, xc):
        if self.K is None:
            return xc
        if self.K.shape[1] == 0:
            return np.zeros(self.alg.dim)
        if self.K.shape[1] == 1:
            return self.K[:, 0]
        return self.K @ xc

    def evaluate(self, z):
        logp, xc, lam, u = self.unpack(z)
        p = self.template.full(np.exp(logp))
        frame = self.template.frame(self.alg, p)
        conn = connection_koszul(frame)
        ric = _ricci_for(frame, conn, self.unimodular)
        x = frame.to_frame(self.x_user(xc))
        T = ric.matrix + 0.5 * lie_derivative_metric(frame, x, conn) - u * np.outer(x, x)
        T = T - lam * np.eye(self.alg.dim)
        return p, frame, ric, x, T

    def residuals(self, z):
        p, frame, _, x, T = self.evaluate(z)
        parts = [self.weights * T[self.iu]]
        if self.K is not None:
            parts.append(self.weights * sym_ad(frame, x)[self.iu])
        if self.options.normalize:
            parts.append(np.array([np.sum(np.log(p))]))
        return np.concatenate(parts)


def solve_qe(alg: LieAlgebra, form: Optional[InvariantForm], template: DiagonalTemplate,
             seeds=8, options: Optional[SolveOptions] = None) -> List[SolveResult]:
    """Search for m-quasi-Einstein metrics within a diagonal metric family.

    ``seeds`` is either a count of random starting points (log-uniform
    around ``template.initial``) or an array of starting coefficient
    vectors of length n. Unknowns are the logs of the free coefficients,
    the field X, the constant lambda and ``1/m``. With ``options.killing``
    X is kept in the span of the Killing fields found at the first seed
    and the Killing equations are added to the residual. Converged points
    (residual below ``options.tol``) are deduplicated and returned sorted
    by residual.
    """
    options = options or SolveOptions()
    if template.dim != alg.dim:
        raise DimensionError("template and algebra dimensions differ")
    if form is not None and form.dim != alg.dim:
        raise DimensionError("form and algebra dimensions differ")

    if isinstance(seeds, (int, np.integer)):
        rng = default_rng(options.seed)
        starts = [template.initial * np.exp(rng.uniform(-options.spread, options.spread, alg.dim))
                  for _ in range(int(seeds))]
    else:
        starts = [np.asarray(s, dtype=float) for s in seeds]
    for s in starts:
        if s.shape != (alg.dim,) or not np.all(np.isfinite(s)) or np.any(s <= 0):
            from .errors import NotPositiveDefiniteError

            raise NotPositiveDefiniteError("seed coefficients must be finite and positive")

    unimodular = True
    results: List[SolveResult] = []
    for start in starts:
        p0 = template.initial.copy()
        p0[template.free] = start[template.free]
        frame0 = template.frame(alg, p0)
        unimodular = frame0.is_unimodular()[0]
        if options.killing:
            kill = killing_subspace(frame0)
            K = np.stack([frame0.to_user(v) for v in kill], axis=1) if kill else np.zeros((alg.dim, 0))
        else:
            K = None
        prob = _Problem(alg, template, K, options, unimodular)
        ric0 = _ricci_for(frame0, connection_koszul(frame0), unimodular)
        z0 = [np.log(p0[template.free])]
        if prob.nx:
            z0.append(np.ones(prob.nx) / math.sqrt(prob.nx))
        z0.append([np.trace(ric0.matrix) / alg.dim])
        if prob.use_u:
            z0.append([0.5])
        z0 = np.concatenate(z0)
        r0 = prob.residuals(z0)
        method = "lm" if len(r0) >= len(z0) else "trf"
        try:
            sol = least_squares(prob.residuals, z0, method=method, xtol=1e-15, ftol=1e-15,
                                gtol=1e-15, max_nfev=options.max_nfev)
        except (np.linalg.LinAlgError, LiecurvError, FloatingPointError) as exc:
            log.debug("seed %s failed: %s", start, exc)
            continue
        if not np.all(np.isfinite(sol.x)):
            continue
        try:
            z = _polish(prob.residuals, sol.x, options.tol)
            p, frame, ric, x, _ = prob.evaluate(z)
        except (np.linalg.LinAlgError, LiecurvError):
            continue
        _, _, lam, u = prob.unpack(z)
        if u < 0:
            if u < -options.tol:
                continue
            u = 0.0
        m = math.inf if u == 0.0 else 1.0 / u
        witness = QEWitness.build(frame, ric, x, lam, m)
        if witness.residual >= options.tol:
            log.debug("seed %s stalled at residual %.3g", start, witness.residual)
            continue
        ok, viol = verify_killing_theorem(frame, witness)
        results.append(SolveResult(p, frame, witness, ok, viol, int(sol.nfev)))

    return _dedup(results, options.dedup)


def _jacobian(fun, z):
    h = np.cbrt(np.finfo(float).eps) * np.maximum(1.0, np.abs(z))
    cols = []
    for i in range(len(z)):
        dz = np.zeros_like(z)
        dz[i] = h[i]
        cols.append((fun(z + dz) - fun(z - dz)) / (2 * h[i]))
    return np.stack(cols, axis=1)


def _polish(fun, z, tol, steps=5):
    """Minimum-norm Gauss-Newton steps with a central-difference Jacobian.

    LM stalls near 1e-8 on the flat directions of the problem (e.g. the
    joint scaling of X and 1/m); a few rank-deficient Newton steps finish
    the job. The best iterate is returned.
    """
    best, best_norm = z, np.linalg.norm(fun(z))
    for _ in range(steps):
        if best_norm < 1e-3 * tol:
            break
        J = _jacobian(fun, z)
        step = np.linalg.lstsq(J, -fun(z), rcond=1e-12)[0]
        z = z + step
        norm = np.linalg.norm(fun(z))
        if not np.isfinite(norm):
            break
        if norm < best_norm:
            best, best_norm = z, norm
    return best


def _dedup(results, dist):
    def key(r):
        lp = np.log(r.params)
        return lp - lp.mean()

    results = sorted(results, key=lambda r: (r.witness.residual, tuple(r.params)))
    kept = []
    for r in results:
        if all(np.linalg.norm(key(r) - key(k)) > dist for k in kept):
            kept.append(r)
    return kept
