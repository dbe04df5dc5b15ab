"""Simulation and verification of quantum query algorithms for multivariate
polynomial interpolation over F_q, R and C."""

__version__ = "0.1.0"

from .ffield import FieldElement, FieldParams, ff_make, field_for_q  # noqa: E402
from .monomial import eval_poly, eval_veronese, exponents  # noqa: E402
from .zmap import QueryTuple, RangeSet, enumerate_range, range_ratio, restricted_range  # noqa: E402

__all__ = [
    "FieldElement",
    "FieldParams",
    "QueryTuple",
    "RangeSet",
    "enumerate_range",
    "eval_poly",
    "eval_veronese",
    "exponents",
    "ff_make",
    "field_for_q",
    "range_ratio",
    "restricted_range",
]
