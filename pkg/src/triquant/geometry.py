"""Planar homography estimation and projective overlay of an image pair."""

from __future__ import annotations

import math
from collections.abc import Sequence

import numpy as np

from .image import validate_gray
from .matching import BlockMatch


class HomographyError(RuntimeError):
    """Homography estimation could not produce a usable matrix."""


def normalize_homography(h) -> np.ndarray:
    """Scale a 3x3 matrix so its bottom-right entry is 1.

    Falls back to unit Frobenius norm when that entry is numerically
    zero.
    """
    m = np.asarray(h, dtype=np.float64)
    if m.shape != (3, 3):
        raise ValueError(f"expected a 3x3 matrix, got shape {m.shape}")
    if not np.isfinite(m).all():
        raise ValueError("matrix contains non-finite entries")
    if abs(m[2, 2]) > 1e-12:
        return m / m[2, 2]
    return m / np.linalg.norm(m)


def apply_homography(h, pt) -> tuple[float, float]:
    """Map an (x, y) point through a homography.

    Raises ValueError when the point maps to infinity (zero third
    homogeneous coordinate).
    """
    m = np.asarray(h, dtype=np.float64)
    x, y = float(pt[0]), float(pt[1])
    v = m @ (x, y, 1.0)
    if abs(v[2]) < 1e-12:
        raise ValueError(f"point {pt} maps to a point at infinity")
    return (v[0] / v[2], v[1] / v[2])


def _project(h: np.ndarray, pts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Map an (N, 2) point array; returns projections and a finiteness mask."""
    v = np.hstack([pts, np.ones((pts.shape[0], 1))]) @ h.T
    w = v[:, 2]
    ok = np.abs(w) > 1e-12
    out = np.full_like(pts, np.inf)
    out[ok] = v[ok, :2] / w[ok, None]
    return out, ok


def _normalising_transform(pts: np.ndarray) -> np.ndarray | None:
    """Translate to the centroid and scale to mean distance sqrt(2)."""
    centroid = pts.mean(axis=0)
    dist = np.sqrt(((pts - centroid) ** 2).sum(axis=1)).mean()
    if dist < 1e-12:
        return None
    s = math.sqrt(2.0) / dist
    return np.array(
        [[s, 0.0, -s * centroid[0]], [0.0, s, -s * centroid[1]], [0.0, 0.0, 1.0]]
    )


def _dlt(src: np.ndarray, dst: np.ndarray) -> np.ndarray | None:
    """Algebraic least-squares homography via the normalised DLT.

    Returns None for degenerate configurations (coincident points,
    collinear samples, rank-deficient systems).
    """
    n = src.shape[0]
    ts = _normalising_transform(src)
    td = _normalising_transform(dst)
    if ts is None or td is None:
        return None
    s = (np.hstack([src, np.ones((n, 1))]) @ ts.T)[:, :2]
    d = (np.hstack([dst, np.ones((n, 1))]) @ td.T)[:, :2]
    a = np.zeros((2 * n, 9))
    a[0::2, 0] = s[:, 0]
    a[0::2, 1] = s[:, 1]
    a[0::2, 2] = 1.0
    a[0::2, 6] = -d[:, 0] * s[:, 0]
    a[0::2, 7] = -d[:, 0] * s[:, 1]
    a[0::2, 8] = -d[:, 0]
    a[1::2, 3] = s[:, 0]
    a[1::2, 4] = s[:, 1]
    a[1::2, 5] = 1.0
    a[1::2, 6] = -d[:, 1] * s[:, 0]
    a[1::2, 7] = -d[:, 1] * s[:, 1]
    a[1::2, 8] = -d[:, 1]
    try:
        _, _, vt = np.linalg.svd(a)
    except np.linalg.LinAlgError:
        return None
    h = np.linalg.inv(td) @ vt[-1].reshape(3, 3) @ ts
    if not np.isfinite(h).all() or abs(np.linalg.det(h)) < 1e-10:
        return None
    return normalize_homography(h)


def fit_homography(
    matches: Sequence[BlockMatch],
    threshold: float = 3.0,
    iterations: int = 1000,
    seed: int = 0,
) -> tuple[np.ndarray, list[int]]:
    """Estimate the homography behind a set of block matches with RANSAC.

    Match sources and destinations are (row, col) pixels; the estimate
    maps (x, y) = (col, row) points of image 1 onto image 2.  Minimal
    4-match hypotheses are scored by inlier count (reprojection
    distance under ``threshold``), ties by lower mean inlier error, and
    the winner is refit on all its inliers.  Every iteration draws from
    its own seed-derived stream, so the result is reproducible.

    Returns the refit matrix and the sorted inlier indices.
    """
    if not (math.isfinite(threshold) and threshold > 0):
        raise ValueError(f"threshold must be finite and > 0, got {threshold!r}")
    if not isinstance(iterations, (int, np.integer)) or iterations < 1:
        raise ValueError(f"iterations must be an integer >= 1, got {iterations!r}")
    src = np.array([[m.src[1], m.src[0]] for m in matches], dtype=np.float64)
    dst = np.array([[m.dst[1], m.dst[0]] for m in matches], dtype=np.float64)
    n = len(src)
    if n < 4:
        raise HomographyError(f"need at least 4 matches, got {n}")

    best_count = 0
    best_err = math.inf
    best_inliers: np.ndarray | None = None
    for it in range(iterations):
        rng = np.random.default_rng((seed, it))
        sample = rng.choice(n, size=4, replace=False)
        h = _dlt(src[sample], dst[sample])
        if h is None:
            continue
        proj, ok = _project(h, src)
        err = np.full(n, np.inf)
        err[ok] = np.hypot(proj[ok, 0] - dst[ok, 0], proj[ok, 1] - dst[ok, 1])
        inliers = err < threshold
        count = int(inliers.sum())
        if count < 4:
            continue
        mean_err = float(err[inliers].mean())
        if count > best_count or (count == best_count and mean_err < best_err):
            best_count, best_err, best_inliers = count, mean_err, inliers
    if best_inliers is None:
        raise HomographyError("no sample produced a non-degenerate homography")
    h = _dlt(src[best_inliers], dst[best_inliers])
    if h is None:
        raise HomographyError("refit on the inlier set is degenerate")
    return h, np.flatnonzero(best_inliers).tolist()


def warp_overlay(img1, img2, h) -> np.ndarray:
    """Pull the second image into the first one's frame and colourise.

    Every output pixel (x, y) of image 1 samples image 2 at H(x, y)
    with bilinear interpolation, zero outside the source.  Channels are
    (img1, warped img2, img1): agreement renders grey, disagreement
    splits into magenta and green.
    """
    a = validate_gray(img1)
    b = validate_gray(img2)
    m = np.asarray(h, dtype=np.float64)
    if m.shape != (3, 3) or not np.isfinite(m).all() or abs(np.linalg.det(m)) < 1e-12:
        raise ValueError("homography must be a finite invertible 3x3 matrix")
    hh, ww = a.shape
    ys, xs = np.indices((hh, ww), dtype=np.float64)
    v = m @ np.stack([xs.ravel(), ys.ravel(), np.ones(hh * ww)])
    w3 = v[2]
    ok = np.abs(w3) > 1e-12
    sx = np.zeros(hh * ww)
    sy = np.zeros(hh * ww)
    sx[ok] = v[0, ok] / w3[ok]
    sy[ok] = v[1, ok] / w3[ok]
    warped = _bilinear_zero(b, sx, sy, ok).reshape(hh, ww)
    return np.stack([a, warped, a], axis=-1)


def _bilinear_zero(src: np.ndarray, sx: np.ndarray, sy: np.ndarray, ok: np.ndarray) -> np.ndarray:
    """Bilinear sampling with zero fill outside the source raster."""
    h, w = src.shape
    out = np.zeros(sx.shape)
    inside = ok & (sx > -1.0) & (sx < w) & (sy > -1.0) & (sy < h)
    if not inside.any():
        return out
    x = sx[inside]
    y = sy[inside]
    x0 = np.floor(x)
    y0 = np.floor(y)
    fx = x - x0
    fy = y - y0
    padded = np.pad(src, 1)
    xi = x0.astype(np.int64) + 1
    yi = y0.astype(np.int64) + 1
    v00 = padded[yi, xi]
    v01 = padded[yi, xi + 1]
    v10 = padded[yi + 1, xi]
    v11 = padded[yi + 1, xi + 1]
    out[inside] = (
        v00 * (1 - fy) * (1 - fx)
        + v01 * (1 - fy) * fx
        + v10 * fy * (1 - fx)
        + v11 * fy * fx
    )
    return out
