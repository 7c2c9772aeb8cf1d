"""Exact filtered Floer-type complexes over the universal Novikov field."""

from .novikov import INF, NEG_INF, NovikovScalar, format_scalar, parse_scalar
from .complex import (
    CappedComplex,
    CappedGenerator,
    Chain,
    FilteredComplex,
    Generator,
    ell,
    iota,
    pi_k_member,
    validate,
)
from .spectral import (
    DetectionFunctional,
    NotApplicable,
    barcode,
    boundary_depth,
    detection_bound,
    extension_distance_check,
    spectral_invariant,
    stability_check,
    svd,
)
from .kunneth import direct_sum, tensor, verify_max_formula, verify_product_formula

__all__ = [
    "INF", "NEG_INF", "NovikovScalar", "format_scalar", "parse_scalar",
    "CappedComplex", "CappedGenerator", "Chain", "FilteredComplex", "Generator",
    "ell", "iota", "pi_k_member", "validate",
    "DetectionFunctional", "NotApplicable", "barcode", "boundary_depth", "detection_bound",
    "extension_distance_check", "spectral_invariant", "stability_check", "svd",
    "direct_sum", "tensor", "verify_max_formula", "verify_product_formula",
]
