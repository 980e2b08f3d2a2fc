"""Ternary local-mean image transform, shape features and matching.

The pipeline quantises each pixel's offset from its local box mean
into {-1, 0, +1} using a summed-area table, then derives regions,
polarity edges, chains and corners from the ternary raster, matches
ternary patches between images with an L1 score, and registers pairs
with a RANSAC-fitted homography.
"""

from .features import (
    Corner,
    EdgeChain,
    Region,
    detect_corners,
    extract_edges,
    gradient_filter,
    label_regions,
    trace_chains,
)
from .geometry import (
    HomographyError,
    apply_homography,
    fit_homography,
    normalize_homography,
    warp_overlay,
)
from .image import validate_gray, validate_ternary
from .integral import IntegralImage, build_integral
from .matching import (
    BlockMatch,
    MatchParams,
    Surface,
    block_match,
    sad,
    sad_surface,
    texture_score,
    zncc_surface,
)
from .transform import (
    ORIENTATIONS,
    TransformParams,
    ternary_transform,
    ternary_transform_asymmetric,
    ternary_transform_multiscale,
)

__version__ = "0.1.0"

__all__ = [
    "BlockMatch",
    "Corner",
    "EdgeChain",
    "HomographyError",
    "IntegralImage",
    "MatchParams",
    "ORIENTATIONS",
    "Region",
    "Surface",
    "TransformParams",
    "apply_homography",
    "block_match",
    "build_integral",
    "detect_corners",
    "extract_edges",
    "fit_homography",
    "gradient_filter",
    "label_regions",
    "normalize_homography",
    "sad",
    "sad_surface",
    "ternary_transform",
    "ternary_transform_asymmetric",
    "ternary_transform_multiscale",
    "texture_score",
    "trace_chains",
    "validate_gray",
    "validate_ternary",
    "warp_overlay",
    "zncc_surface",
]
