"""Ternary quantisation of each pixel's offset from its local box mean."""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np

from .image import validate_gray
from .integral import build_integral

ORIENTATIONS = ("left", "right", "up", "down")

# Half-window spans per orientation as (r_lo, r_hi, c_lo, c_hi) unit
# offsets, scaled by d at use; the centre row/column is always included.
_HALF_SPANS = {
    "left": (-1, 1, -1, 0),
    "right": (-1, 1, 0, 1),
    "up": (-1, 0, -1, 1),
    "down": (0, 1, -1, 1),
}


@dataclass(frozen=True)
class TransformParams:
    """Window half-size and quantisation thresholds.

    ``d`` is the half-window in pixels (window side 2d+1).  Pixels more
    than ``k1`` above their local mean map to +1, more than ``k2``
    below it to -1, anything else to 0.
    """

    d: int = 12
    k1: float = 4.0
    k2: float = 4.0

    def __post_init__(self) -> None:
        if not isinstance(self.d, (int, np.integer)) or self.d < 1:
            raise ValueError(f"d must be an integer >= 1, got {self.d!r}")
        if not (math.isfinite(self.k1) and self.k1 > 0):
            raise ValueError(f"k1 must be finite and > 0, got {self.k1!r}")
        if not (math.isfinite(self.k2) and self.k2 > 0):
            raise ValueError(f"k2 must be finite and > 0, got {self.k2!r}")


def _check_window(shape: tuple[int, int], d: int) -> None:
    if 2 * d + 1 > min(shape):
        raise ValueError(f"window side {2 * d + 1} exceeds image of shape {shape}")


def _quantise(diff: np.ndarray, k1: float, k2: float) -> np.ndarray:
    out = np.zeros(diff.shape, dtype=np.int8)
    out[diff > k1] = 1
    out[diff < -k2] = -1
    return out


def ternary_transform(img, params: TransformParams | None = None) -> np.ndarray:
    """Quantise each pixel against its local box mean into {-1, 0, +1}.

    Output pixels whose full window does not fit inside the image (a
    border band of width d) are 0.
    """
    p = params or TransformParams()
    arr = validate_gray(img)
    _check_window(arr.shape, p.d)
    h, w = arr.shape
    d = p.d
    means = build_integral(arr).window_means(d)
    out = np.zeros((h, w), dtype=np.int8)
    out[d : h - d, d : w - d] = _quantise(arr[d : h - d, d : w - d] - means, p.k1, p.k2)
    return out


def ternary_transform_multiscale(img, scales: Sequence[TransformParams]) -> np.ndarray:
    """Combine several window sizes, finest first.

    Per pixel the result is the first nonzero single-scale response in
    the given order, so small-window detail wins over broad contrast.
    """
    scales = list(scales)
    if not scales:
        raise ValueError("at least one scale is required")
    arr = validate_gray(img)
    out = np.zeros(arr.shape, dtype=np.int8)
    undecided = np.ones(arr.shape, dtype=bool)
    for p in scales:
        t = ternary_transform(arr, p)
        take = undecided & (t != 0)
        out[take] = t[take]
        undecided &= ~take
    return out


def ternary_transform_asymmetric(
    img,
    params: TransformParams | None = None,
    orientations: Iterable[str] = ORIENTATIONS,
) -> np.ndarray:
    """Quantise against one-sided half-window means and majority-vote.

    Each orientation's mean covers the (d+1) x (2d+1) rectangle leaning
    d pixels that way from the centre (centre row/column included).
    Nonzero responses are combined by sign majority; ties and all-zero
    give 0.  The valid region matches the symmetric transform, so the
    border band of width d stays 0.
    """
    p = params or TransformParams()
    arr = validate_gray(img)
    _check_window(arr.shape, p.d)
    names = list(dict.fromkeys(orientations))
    if not names:
        raise ValueError("at least one orientation is required")
    unknown = [n for n in names if n not in _HALF_SPANS]
    if unknown:
        raise ValueError(f"unknown orientations {unknown}; valid: {ORIENTATIONS}")
    ii = build_integral(arr)
    h, w = arr.shape
    d = p.d
    centre = arr[d : h - d, d : w - d]
    pos = np.zeros(centre.shape, dtype=np.int16)
    neg = np.zeros(centre.shape, dtype=np.int16)
    for name in names:
        r_lo, r_hi, c_lo, c_hi = (k * d for k in _HALF_SPANS[name])
        resp = _quantise(centre - ii.rect_means(d, r_lo, r_hi, c_lo, c_hi), p.k1, p.k2)
        pos += resp == 1
        neg += resp == -1
    core = np.zeros(centre.shape, dtype=np.int8)
    core[pos > neg] = 1
    core[neg > pos] = -1
    out = np.zeros(arr.shape, dtype=np.int8)
    out[d : h - d, d : w - d] = core
    return out
