"""Critical points of the signed volume of polygonal arms."""

from ._core import (
    __version__,
    bott_morse_check,
    classify_critical,
    cosine_rule_convert,
    euclidean_gradient,
    extract_isosurface,
    find_critical_points,
    gram_critical_points,
    gram_det,
    gram_from_config,
    gram_gradient,
    gram_hessian,
    gradient_norm,
    isosurface_error_bound,
    morse_data,
    projected_area,
    random_start,
    reconstruct_from_gram,
    riemannian_gradient,
    signed_area,
    signed_volume,
)

__all__ = [
    "__version__",
    "bott_morse_check",
    "classify_critical",
    "cosine_rule_convert",
    "euclidean_gradient",
    "extract_isosurface",
    "find_critical_points",
    "gram_critical_points",
    "gram_det",
    "gram_from_config",
    "gram_gradient",
    "gram_hessian",
    "gradient_norm",
    "isosurface_error_bound",
    "morse_data",
    "projected_area",
    "random_start",
    "reconstruct_from_gram",
    "riemannian_gradient",
    "signed_area",
    "signed_volume",
]
