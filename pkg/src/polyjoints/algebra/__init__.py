"""Exact field arithmetic and sparse polynomial calculus."""

from .calculus import (
    InvariantViolation,
    PthPowerStructure,
    gradient,
    hasse_derivative,
    hessian,
    pth_power_structure,
    restrict_to_line,
    square_free_part,
    taylor_expand,
    unit,
)
from .field import Field, Scalar, is_prime
from .poly import MultiPoly, grlex_key, parse_poly
from .resultant import det_bareiss, det_cofactor, resultant, sylvester_matrix
from .univariate import UniPoly, isolate_real_roots, sample_between_roots

__all__ = [
    "Field", "Scalar", "is_prime", "MultiPoly", "UniPoly", "parse_poly", "grlex_key",
    "hasse_derivative", "gradient", "hessian", "restrict_to_line", "pth_power_structure",
    "PthPowerStructure", "InvariantViolation", "square_free_part", "taylor_expand", "unit",
    "resultant", "sylvester_matrix", "det_bareiss", "det_cofactor",
    "isolate_real_roots", "sample_between_roots",
]
