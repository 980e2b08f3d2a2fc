"""Array conventions shared across the library.

Grey images are 2-D float64 rasters with intensities in [0, 255].
Ternary images are 2-D int8 rasters over the alphabet {-1, 0, +1}.
Pixel coordinates are (row, col) with row 0 at the top.
"""

from __future__ import annotations

import numpy as np

INTENSITY_MIN = 0.0
INTENSITY_MAX = 255.0


def validate_gray(img) -> np.ndarray:
    """Return ``img`` as a float64 array, checking the grey-image contract."""
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim != 2 or arr.size == 0:
        raise ValueError(f"expected a nonempty 2-D image, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValueError("image contains non-finite intensities")
    if arr.min() < INTENSITY_MIN or arr.max() > INTENSITY_MAX:
        raise ValueError("intensities must lie within [0, 255]")
    return arr


def validate_ternary(t) -> np.ndarray:
    """Return ``t`` as an int8 array, checking the ternary-image contract."""
    arr = np.asarray(t)
    if arr.ndim != 2 or arr.size == 0:
        raise ValueError(f"expected a nonempty 2-D ternary image, got shape {arr.shape}")
    if not np.issubdtype(arr.dtype, np.integer):
        raise ValueError(f"ternary image must have an integer dtype, got {arr.dtype}")
    if arr.min() < -1 or arr.max() > 1:
        raise ValueError("ternary values must be -1, 0 or +1")
    return arr.astype(np.int8, copy=False)
