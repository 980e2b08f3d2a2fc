"""Deterministic visualisations for the command-line tools."""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from .features import Corner
from .fileio import ternary_to_gray, to_uint8
from .matching import BlockMatch, Surface

# Fixed 12-colour cycle; label k renders with entry k mod 12.
PALETTE = np.array(
    [
        (230, 25, 75),
        (60, 180, 75),
        (255, 225, 25),
        (0, 130, 200),
        (245, 130, 48),
        (145, 30, 180),
        (70, 240, 240),
        (240, 50, 230),
        (210, 245, 60),
        (250, 190, 212),
        (0, 128, 128),
        (220, 190, 255),
    ],
    dtype=np.uint8,
)

MAGENTA = (255, 0, 255)
GREEN = (0, 255, 0)
YELLOW = (255, 255, 0)
RED = (255, 0, 0)


def region_image(labels) -> np.ndarray:
    """Colour-cycled rendering of a label map."""
    return PALETTE[np.asarray(labels) % len(PALETTE)]


def mask_image(mask) -> np.ndarray:
    """Binary mask as a {0, 255} grey raster."""
    return np.where(np.asarray(mask, dtype=bool), 255, 0).astype(np.uint8)


def gray_to_rgb(img) -> np.ndarray:
    g = to_uint8(img)
    return np.stack([g, g, g], axis=-1)


def draw_cross(rgb: np.ndarray, r: int, c: int, colour, radius: int = 3) -> None:
    """Diagonal 'x' marker, clipped to the raster."""
    h, w = rgb.shape[:2]
    for k in range(-radius, radius + 1):
        for rr, cc in ((r + k, c + k), (r + k, c - k)):
            if 0 <= rr < h and 0 <= cc < w:
                rgb[rr, cc] = colour


def draw_plus(rgb: np.ndarray, r: int, c: int, colour, radius: int = 3) -> None:
    """Axis-aligned '+' marker, clipped to the raster."""
    h, w = rgb.shape[:2]
    for k in range(-radius, radius + 1):
        if 0 <= r + k < h and 0 <= c < w:
            rgb[r + k, c] = colour
        if 0 <= r < h and 0 <= c + k < w:
            rgb[r, c + k] = colour


def draw_segment(rgb: np.ndarray, a: tuple[int, int], b: tuple[int, int], colour) -> None:
    """Bresenham line between two (row, col) pixels, clipped to the raster."""
    r0, c0 = a
    r1, c1 = b
    dr = abs(r1 - r0)
    dc = abs(c1 - c0)
    sr = 1 if r0 < r1 else -1
    sc = 1 if c0 < c1 else -1
    err = dc - dr
    h, w = rgb.shape[:2]
    r, c = r0, c0
    while True:
        if 0 <= r < h and 0 <= c < w:
            rgb[r, c] = colour
        if r == r1 and c == c1:
            break
        e2 = 2 * err
        if e2 > -dr:
            err -= dr
            c += sc
        if e2 < dc:
            err += dc
            r += sr


def corner_image(img, corners: Sequence[Corner]) -> np.ndarray:
    """Input image with a red cross at every corner."""
    rgb = gray_to_rgb(img)
    for corner in corners:
        draw_cross(rgb, corner.position[0], corner.position[1], RED)
    return rgb


def match_image(t1, t2, matches: Sequence[BlockMatch]) -> np.ndarray:
    """Both ternary rasters blended, with marked and connected matches.

    The first image fills the red and blue channels and the second the
    green one; sources get a magenta x, destinations a green +, and a
    yellow segment joins each pair.
    """
    g1 = ternary_to_gray(t1) // 2
    g2 = ternary_to_gray(t2) // 2
    rgb = np.stack([g1, g2, g1], axis=-1)
    for m in matches:
        draw_segment(rgb, m.src, m.dst, YELLOW)
    for m in matches:
        draw_cross(rgb, m.src[0], m.src[1], MAGENTA)
        draw_plus(rgb, m.dst[0], m.dst[1], GREEN)
    return rgb


def surface_image(surface: Surface) -> np.ndarray:
    """Grey heatmap of a score surface, brighter meaning a better match.

    SAD grids are negated first so that peaks mark good matches in both
    metrics.
    """
    vals = surface.grid.astype(np.float64)
    if surface.metric == "sad":
        vals = -vals
    lo = float(vals.min())
    hi = float(vals.max())
    if hi - lo < 1e-12:
        return np.full(vals.shape, 128, dtype=np.uint8)
    return np.floor((vals - lo) / (hi - lo) * 255.0 + 0.5).astype(np.uint8)
