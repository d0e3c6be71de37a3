"""Quadratic-differential linear algebra on hyperelliptic curves.

Basis construction in x-charts, jet evaluation in local charts around
generic, branch, and infinite points, constraint subspaces of divisors,
the projective point map, divided-difference span diagnostics, secant
membership searches, and dual decompositions of covectors.
"""

from .curve import HyperellipticCurve, CurvePoint, Divisor
from .charts import chart_series, NTERMS
from .jets import (
    Subspace,
    jet_rows,
    raw_jet_rows,
    stack_divisor_rows,
    q_of_divisor,
    kodaira_point,
    projective_distance,
    max_vanishing_order,
    RANK_TOL,
)
from .divdiff import (
    divided_difference_table,
    span_agreement,
    span_agreement_poly,
    confluent_limit,
    MAX_DEGREE,
)
from .secant import (
    secant_membership,
    membership_certificate,
    order01_rows,
    SecantResult,
    MEMBER_TOL,
)
from .decompose import dual_decomposition, DualDecomposition, DualFunctional

__all__ = [
    "HyperellipticCurve", "CurvePoint", "Divisor",
    "chart_series", "NTERMS",
    "Subspace", "jet_rows", "raw_jet_rows", "stack_divisor_rows",
    "q_of_divisor", "kodaira_point", "projective_distance",
    "max_vanishing_order", "RANK_TOL",
    "divided_difference_table", "span_agreement", "span_agreement_poly",
    "confluent_limit", "MAX_DEGREE",
    "secant_membership", "membership_certificate", "order01_rows",
    "SecantResult", "MEMBER_TOL",
    "dual_decomposition", "DualDecomposition", "DualFunctional",
]
