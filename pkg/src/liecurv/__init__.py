"""Left-invariant Riemannian geometry on quadratic Lie groups and m-quasi-Einstein metrics."""

__version__ = "0.1.0"

from .errors import (DegenerateFormError, DimensionError, DocumentError, FamilyConstraintError,
                     LiecurvError, NotPositiveDefiniteError, NotUnimodularError)
from .lie_core import (LieAlgebra, ValidationReport, ad_matrix, bracket, derived_algebra_dim,
                       is_unimodular, so3, validate_jacobi)
from .quad_form import (AdaptedFrame, InvariantForm, Metric, OrthonormalFrame, adapted_frame,
                        check_ad_invariance, theta_map)
from .curvature import (Connection, RicciTensor, connection_koszul, connection_theta,
                        grad_sc_check, ricci_closed_form, ricci_oracle, ricci_trace,
                        scalar_curvature)
from .quasi_einstein import (DiagonalTemplate, QEWitness, SolveOptions, SolveResult,
                             killing_subspace, lie_derivative_metric, qe_residual, ric_m_X,
                             solve_qe, sym_ad, verify_killing_theorem)
from .gn_family import (GnMetricParams, GnSpec, build_gn, gn_frame, gn_metric,
                        gn_scalar_curvature_closed, non_equivalence_witness, qe_family_point,
                        solve_gn)
from .serialization import algebra_document, load_algebra, save_algebra

__all__ = [
    "DegenerateFormError", "DimensionError", "DocumentError", "FamilyConstraintError", "LiecurvError",
    "NotPositiveDefiniteError", "NotUnimodularError",
    "LieAlgebra", "ValidationReport", "ad_matrix", "bracket", "derived_algebra_dim", "is_unimodular",
    "so3", "validate_jacobi",
    "AdaptedFrame", "InvariantForm", "Metric", "OrthonormalFrame", "adapted_frame",
    "check_ad_invariance", "theta_map",
    "Connection", "RicciTensor", "connection_koszul", "connection_theta", "grad_sc_check",
    "ricci_closed_form", "ricci_oracle", "ricci_trace", "scalar_curvature",
    "DiagonalTemplate", "QEWitness", "SolveOptions", "SolveResult", "killing_subspace",
    "lie_derivative_metric", "qe_residual", "ric_m_X", "solve_qe", "sym_ad", "verify_killing_theorem",
    "GnMetricParams", "GnSpec", "build_gn", "gn_frame", "gn_metric", "gn_scalar_curvature_closed",
    "non_equivalence_witness", "qe_family_point", "solve_gn",
    "algebra_document", "load_algebra", "save_algebra",
]
