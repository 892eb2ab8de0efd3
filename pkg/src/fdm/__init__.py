"""Functional dual Brunn–Minkowski toolkit.

Convex functions as max-affine pieces, point hulls, grids and quadratics;
Gaussian dual quermassintegrals and their mixed versions; dual curvature
measures; a variational solver for the functional dual Minkowski problem; and
a small harness that turns the associated inequalities into signed gaps.
"""

from .calculus import (
    check_convexity_grid,
    conjugate,
    gauge_from_polar_vertices,
    inf_convolution,
    infimum,
    normalize_at_origin,
    numeric_conjugate,
    pointwise_max,
    pointwise_min,
    regular_polygon_gauge,
    right_scalar_mult,
    unit_ball_gauge,
)
from .curvature import (
    DiscreteMeasure,
    EmpiricalMeasure,
    body_bridge_check,
    dual_curvature_empirical,
    dual_curvature_semidiscrete,
    hyperplane_support_test,
    tv_distance,
    valuation_check,
)
from .functions import GridFunction, MaxAffine, PointHull, Quadratic
from .inequalities import (
    GapReport,
    brunn_minkowski_gap,
    jensen_monotonicity_check,
    minkowski_gap,
    prekopa_leindler_check,
    standard_battery,
)
from .integrals import (
    IntegralResult,
    dual_quermassintegral,
    mixed_fd,
    mixed_integral,
    normalized_quermassintegral,
    power_mean,
    self_mixed,
)
from .quadrature import QuadratureScheme
from .solver import SolveResult, SolverOptions, objective, objective_gradient, solve, verify_solution

__version__ = "0.1.0"

__all__ = [
    "DiscreteMeasure",
    "EmpiricalMeasure",
    "GapReport",
    "GridFunction",
    "IntegralResult",
    "MaxAffine",
    "PointHull",
    "Quadratic",
    "QuadratureScheme",
    "SolveResult",
    "SolverOptions",
    "body_bridge_check",
    "brunn_minkowski_gap",
    "check_convexity_grid",
    "conjugate",
    "dual_curvature_empirical",
    "dual_curvature_semidiscrete",
    "dual_quermassintegral",
    "gauge_from_polar_vertices",
    "hyperplane_support_test",
    "inf_convolution",
    "infimum",
    "jensen_monotonicity_check",
    "minkowski_gap",
    "mixed_fd",
    "mixed_integral",
    "normalize_at_origin",
    "normalized_quermassintegral",
    "numeric_conjugate",
    "objective",
    "objective_gradient",
    "pointwise_max",
    "pointwise_min",
    "power_mean",
    "prekopa_leindler_check",
    "regular_polygon_gauge",
    "right_scalar_mult",
    "self_mixed",
    "solve",
    "standard_battery",
    "tv_distance",
    "unit_ball_gauge",
    "valuation_check",
    "verify_solution",
]
