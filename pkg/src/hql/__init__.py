"""hql: exact intersection spectra of Hermitian surfaces and tangent quadrics."""

from .field import FieldContext, context_for_q
from .forms import (
    QuadraticForm,
    QuadricClass,
    alpha_pg3,
    classify_pg3,
    classify_pg4,
    count_points_bruteforce,
    point_count,
    polar_matrix,
    quadric_rank,
)
from .hermitian import HermitianSurface, ProjectiveLine
from .intersect import (
    AffineQuadric,
    IntersectionReport,
    check_ovoid,
    check_permutable,
    classify_quadric,
    fast_intersection_size,
    infinity_section,
    normalized_family,
    oracle_intersection_size,
    reguli,
    regulus_secant_distribution,
    subfield_lift,
)

__version__ = "0.1.0"

__all__ = [
    "AffineQuadric",
    "FieldContext",
    "HermitianSurface",
    "IntersectionReport",
    "ProjectiveLine",
    "QuadraticForm",
    "QuadricClass",
    "alpha_pg3",
    "check_ovoid",
    "check_permutable",
    "classify_pg3",
    "classify_pg4",
    "classify_quadric",
    "context_for_q",
    "count_points_bruteforce",
    "fast_intersection_size",
    "infinity_section",
    "normalized_family",
    "oracle_intersection_size",
    "point_count",
    "polar_matrix",
    "quadric_rank",
    "reguli",
    "regulus_secant_distribution",
    "subfield_lift",
    "__version__",
]
