"""Ternary block matching and match-score surfaces."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .image import validate_gray, validate_ternary


@dataclass(frozen=True)
class MatchParams:
    """Patch geometry, search radii and acceptance gates for matching.

    ``dim`` is the patch half-size, so patches are (2 dim + 1) square;
    ``max_r``/``max_c`` bound the displacement search; candidate centres
    step ``row_stride``/``col_stride`` over the image with a dim+2
    margin.  A patch is matchable when it has more than ``texture_min``
    nonzero pixels, and a match is kept when its best score stays below
    ``sad_max``.
    """

    dim: int = 40
    max_r: int = 10
    max_c: int = 10
    row_stride: int = 100
    col_stride: int = 50
    texture_min: float = 1050.0
    sad_max: float = 6000.0
    compat_sentinel: bool = False

    def __post_init__(self) -> None:
        if not isinstance(self.dim, (int, np.integer)) or self.dim < 1:
            raise ValueError(f"dim must be an integer >= 1, got {self.dim!r}")
        for name in ("max_r", "max_c"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or v < 0:
                raise ValueError(f"{name} must be an integer >= 0, got {v!r}")
        for name in ("row_stride", "col_stride"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or v < 1:
                raise ValueError(f"{name} must be an integer >= 1, got {v!r}")
        if not (math.isfinite(self.texture_min) and self.texture_min >= 0):
            raise ValueError(f"texture_min must be finite and >= 0, got {self.texture_min!r}")
        if not (math.isfinite(self.sad_max) and self.sad_max > 0):
            raise ValueError(f"sad_max must be finite and > 0, got {self.sad_max!r}")

    @property
    def patch_side(self) -> int:
        return 2 * self.dim + 1

    @property
    def sentinel(self) -> int:
        """Score stored for displacements whose patch leaves the image.

        The default sits strictly above the largest attainable SAD for
        this patch size, so it can never win; ``compat_sentinel``
        selects the fixed value 7000 instead.
        """
        if self.compat_sentinel:
            return 7000
        return 2 * self.patch_side * self.patch_side + 1


@dataclass(frozen=True)
class BlockMatch:
    """One accepted correspondence: centre in image 1, centre in image 2."""

    src: tuple[int, int]
    dst: tuple[int, int]
    score: int


@dataclass(frozen=True)
class Surface:
    """Score grid over the displacement window.

    ``grid[i, j]`` scores displacement (origin[0] + i, origin[1] + j).
    """

    origin: tuple[int, int]
    grid: np.ndarray
    metric: str


def texture_score(patch) -> int:
    """Count of nonzero ternary pixels: the sum of absolute values."""
    return int(np.abs(np.asarray(patch, dtype=np.int64)).sum())


def sad(patch_a, patch_b) -> int:
    """Sum of absolute differences between two equally sized patches."""
    a = np.asarray(patch_a, dtype=np.int64)
    b = np.asarray(patch_b, dtype=np.int64)
    if a.shape != b.shape:
        raise ValueError(f"patch shapes differ: {a.shape} vs {b.shape}")
    return int(np.abs(a - b).sum())


def _check_centre(shape: tuple[int, int], centre: tuple[int, int], dim: int) -> None:
    r, c = centre
    h, w = shape
    if not (r - dim >= 0 and r + dim < h and c - dim >= 0 and c + dim < w):
        raise ValueError(f"patch of half-size {dim} at {centre} leaves the {h}x{w} image")


def _sad_grid(t1: np.ndarray, t2: np.ndarray, centre: tuple[int, int], p: MatchParams) -> np.ndarray:
    r, c = centre
    dim = p.dim
    patch = t1[r - dim : r + dim + 1, c - dim : c + dim + 1].astype(np.int16)
    h, w = t2.shape
    grid = np.full((2 * p.max_r + 1, 2 * p.max_c + 1), p.sentinel, dtype=np.int64)
    for i, dr in enumerate(range(-p.max_r, p.max_r + 1)):
        rr = r + dr
        if rr - dim < 0 or rr + dim >= h:
            continue
        for j, dc in enumerate(range(-p.max_c, p.max_c + 1)):
            cc = c + dc
            if cc - dim < 0 or cc + dim >= w:
                continue
            other = t2[rr - dim : rr + dim + 1, cc - dim : cc + dim + 1]
            grid[i, j] = np.abs(patch - other).sum(dtype=np.int64)
    return grid


def sad_surface(t1, t2, centre: tuple[int, int], params: MatchParams | None = None) -> Surface:
    """Ternary SAD over every displacement in the search window.

    Displacements whose displaced patch leaves the second image carry
    the sentinel score.
    """
    p = params or MatchParams()
    a = validate_ternary(t1)
    b = validate_ternary(t2)
    _check_centre(a.shape, centre, p.dim)
    grid = _sad_grid(a, b, centre, p).astype(np.float64)
    return Surface(origin=(-p.max_r, -p.max_c), grid=grid, metric="sad")


def zncc_surface(img1, img2, centre: tuple[int, int], params: MatchParams | None = None) -> Surface:
    """Zero-mean normalised cross-correlation over the search window.

    Constant patches (zero variance) score 0 by convention, as do
    displacements whose patch leaves the second image.
    """
    p = params or MatchParams()
    a = validate_gray(img1)
    b = validate_gray(img2)
    _check_centre(a.shape, centre, p.dim)
    r, c = centre
    dim = p.dim
    pa = a[r - dim : r + dim + 1, c - dim : c + dim + 1]
    a0 = pa - pa.mean()
    va = float((a0 * a0).sum())
    grid = np.zeros((2 * p.max_r + 1, 2 * p.max_c + 1), dtype=np.float64)
    h, w = b.shape
    if va > 0.0:
        for i, dr in enumerate(range(-p.max_r, p.max_r + 1)):
            rr = r + dr
            if rr - dim < 0 or rr + dim >= h:
                continue
            for j, dc in enumerate(range(-p.max_c, p.max_c + 1)):
                cc = c + dc
                if cc - dim < 0 or cc + dim >= w:
                    continue
                pb = b[rr - dim : rr + dim + 1, cc - dim : cc + dim + 1]
                b0 = pb - pb.mean()
                vb = float((b0 * b0).sum())
                if vb > 0.0:
                    grid[i, j] = float((a0 * b0).sum()) / math.sqrt(va * vb)
    np.clip(grid, -1.0, 1.0, out=grid)
    return Surface(origin=(-p.max_r, -p.max_c), grid=grid, metric="zncc")


def block_match(t1, t2, params: MatchParams | None = None) -> list[BlockMatch]:
    """Match stride-spaced textured patches of the first image into the second.

    Candidates with texture above ``texture_min`` search every
    in-bounds displacement within the radii; the minimum SAD wins, ties
    going to the first displacement in raster order, and the match is
    kept when that minimum is below ``sad_max``.  Matches come out in
    candidate (row, column) order.
    """
    p = params or MatchParams()
    a = validate_ternary(t1)
    b = validate_ternary(t2)
    if a.shape != b.shape:
        raise ValueError(f"image sizes differ: {a.shape} vs {b.shape}")
    h, w = a.shape
    dim = p.dim
    margin = dim + 2
    matches: list[BlockMatch] = []
    for r in range(margin, h - margin, p.row_stride):
        for c in range(margin, w - margin, p.col_stride):
            patch = a[r - dim : r + dim + 1, c - dim : c + dim + 1]
            if np.abs(patch).sum(dtype=np.int64) <= p.texture_min:
                continue
            grid = _sad_grid(a, b, (r, c), p)
            flat = int(np.argmin(grid))
            score = int(grid.flat[flat])
            if score < p.sad_max:
                i, j = divmod(flat, grid.shape[1])
                matches.append(
                    BlockMatch(src=(r, c), dst=(r - p.max_r + i, c - p.max_c + j), score=score)
                )
    return matches
