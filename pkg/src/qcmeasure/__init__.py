"""Quasi-controllability, overshoot and stability analysis for discrete-time
switched linear systems x(t+1) in {A_1 x(t), ..., A_k x(t)}.
"""
__version__ = "0.1.0"

from .errors import (AnalysisError, BudgetExceeded, DegenerateMeasure, DimensionCap,
                     DocumentSyntaxError, NormUnsupported, NotApplicable, NumericalFailure,
                     ValidationError)
from .model import (MatrixFamily, Norm, NormSpec, SystemSpec, Tolerances, dual_norm,
                    induced_matrix_norm, parse_and_validate, vector_norm)
from .linalg import LpOutcome, LpProblem, LpStatus, min_gain, solve_lp, spectral_radius
from .geometry import SymPolytope, hausdorff, inscribed_radius, point_distance, span_dim
from .reachability import (QcStatus, QcVerdict, enumerate_products, orbit_span_dim, qc_check,
                           reach_points)
from .measures import OvmEstimate, QcmEstimate, ovm_empirical, qcm, qcm_point, transient_bound
from .classify import Status, Verdict, classify, instability_profile, jsr_bounds
from .families import (BoundReport, counterexample_family, desync_family, desync_qcm_bound,
                       irreducible, vertex_family, vertex_qcm_bound)
from .robustness import PerturbReport, family_distance_bound, qcm_perturbation_check
