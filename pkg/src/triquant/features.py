"""Shape features extracted from a ternary image.

Regions are 4-connected components of equal ternary value; edges are
boundary pixels of one polarity near the opposite polarity; chains are
walked 8-connected paths through an edge mask; corners are turning-angle
maxima along chains.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .image import validate_gray, validate_ternary

_FOUR_CONN = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)

# 8-neighbour offsets in clockwise ring order starting north; walking
# and branch counting both rely on this fixed order.
_RING = ((-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1))

_POLARITIES = ("dark", "light")


@dataclass(frozen=True)
class Region:
    """A maximal 4-connected area of constant ternary value.

    ``pixels`` stores the member set as run-length runs of
    (row, col_start, length); the runs of all regions partition the image.
    """

    label: int
    value: int
    area: int
    bbox: tuple[int, int, int, int]
    centroid: tuple[float, float]
    pixels: list[tuple[int, int, int]]


@dataclass(frozen=True)
class EdgeChain:
    """An ordered walk of 8-adjacent edge pixels of one polarity."""

    polarity: str
    points: list[tuple[int, int]]
    closed: bool


@dataclass(frozen=True)
class Corner:
    """A turning-angle maximum on an edge chain."""

    position: tuple[int, int]
    turning_angle: float
    chain_id: int
    index_in_chain: int


def label_regions(t) -> tuple[np.ndarray, list[Region]]:
    """Label 4-connected components of equal ternary value.

    Labels are dense 1..N, numbered by first raster-scan encounter, so
    the partition is reproducible.  Returns the label map and one
    Region record per label.
    """
    arr = validate_ternary(t)
    h, w = arr.shape
    combined = np.zeros((h, w), dtype=np.int64)
    offset = 0
    for value in (-1, 0, 1):
        mask = arr == value
        if not mask.any():
            continue
        lab, count = ndimage.label(mask, structure=_FOUR_CONN)
        combined[mask] = lab[mask] + offset
        offset += count

    flat = combined.ravel()
    uniq, first = np.unique(flat, return_index=True)
    order = np.argsort(first, kind="stable")
    remap = np.zeros(offset + 1, dtype=np.int32)
    remap[uniq[order]] = np.arange(1, uniq.size + 1, dtype=np.int32)
    labels = remap[flat].reshape(h, w)

    n = uniq.size
    values = arr.ravel()[first[order]]
    areas = np.bincount(labels.ravel(), minlength=n + 1)
    rows, cols = np.indices((h, w))
    sum_r = np.bincount(labels.ravel(), weights=rows.ravel(), minlength=n + 1)
    sum_c = np.bincount(labels.ravel(), weights=cols.ravel(), minlength=n + 1)
    slices = ndimage.find_objects(labels)

    runs: list[list[tuple[int, int, int]]] = [[] for _ in range(n + 1)]
    for r in range(h):
        row = labels[r]
        breaks = np.flatnonzero(row[1:] != row[:-1]) + 1
        starts = np.concatenate(([0], breaks))
        ends = np.concatenate((breaks, [w]))
        for s, e in zip(starts.tolist(), ends.tolist()):
            runs[row[s]].append((r, s, e - s))

    regions = []
    for k in range(1, n + 1):
        sl = slices[k - 1]
        regions.append(
            Region(
                label=k,
                value=int(values[k - 1]),
                area=int(areas[k]),
                bbox=(sl[0].start, sl[1].start, sl[0].stop - 1, sl[1].stop - 1),
                centroid=(sum_r[k] / areas[k], sum_c[k] / areas[k]),
                pixels=runs[k],
            )
        )
    return labels, regions


def extract_edges(t, polarity: str, proximity: int = 2) -> np.ndarray:
    """Mask of boundary pixels of one polarity near the opposite one.

    A dark edge pixel has value -1, at least one in-image 4-neighbour
    with a different value, and some +1 pixel within Chebyshev distance
    ``proximity``; light edges mirror the polarities.
    """
    arr = validate_ternary(t)
    if polarity not in _POLARITIES:
        raise ValueError(f"polarity must be one of {_POLARITIES}, got {polarity!r}")
    if not isinstance(proximity, (int, np.integer)) or proximity < 1:
        raise ValueError(f"proximity must be an integer >= 1, got {proximity!r}")
    target = -1 if polarity == "dark" else 1

    differs = arr != target
    boundary = np.zeros(arr.shape, dtype=bool)
    boundary[1:, :] |= differs[:-1, :]
    boundary[:-1, :] |= differs[1:, :]
    boundary[:, 1:] |= differs[:, :-1]
    boundary[:, :-1] |= differs[:, 1:]

    near_opposite = ndimage.maximum_filter(
        (arr == -target).astype(np.uint8),
        size=2 * proximity + 1,
        mode="constant",
        cval=0,
    ).astype(bool)
    return (arr == target) & boundary & near_opposite


def gradient_filter(mask, img, gmin: float) -> np.ndarray:
    """Keep edge pixels whose image gradient is at least ``gmin``.

    Strength is the larger absolute central difference over the two
    axes (one-sided differences at the image border).
    """
    mask = np.asarray(mask, dtype=bool)
    arr = validate_gray(img)
    if mask.shape != arr.shape:
        raise ValueError(f"mask shape {mask.shape} differs from image {arr.shape}")
    if not (math.isfinite(gmin) and gmin >= 0):
        raise ValueError(f"gmin must be finite and >= 0, got {gmin!r}")
    dr, dc = np.gradient(arr)
    strength = np.maximum(np.abs(dr), np.abs(dc))
    return mask & (strength >= gmin)


def trace_chains(mask, polarity: str = "dark") -> list[EdgeChain]:
    """Partition an edge mask into walked 8-connected chains.

    A pixel where more than two branches of the mask meet ends a walk;
    branches are counted as runs of set neighbours around the 8-pixel
    ring, so a corner of a one-pixel-wide curve is not a branch point.
    Every mask pixel lands in exactly one chain.  A chain is closed
    when its walk comes back next to its seed.  Raster-scan seeding and
    the fixed neighbour order make the output deterministic.
    """
    arr = np.asarray(mask, dtype=bool)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D mask, got shape {arr.shape}")
    if polarity not in _POLARITIES:
        raise ValueError(f"polarity must be one of {_POLARITIES}, got {polarity!r}")

    rows, cols = np.nonzero(arr)
    pixels = list(zip(rows.tolist(), cols.tolist()))
    in_mask = set(pixels)

    def branchy(p: tuple[int, int]) -> bool:
        r, c = p
        flags = [(r + dr, c + dc) in in_mask for dr, dc in _RING]
        arcs = sum(flags[i] and not flags[i - 1] for i in range(8))
        if arcs == 0 and any(flags):
            arcs = 1
        return arcs > 2

    junction = {p: branchy(p) for p in pixels}
    visited: set[tuple[int, int]] = set()

    def next_unvisited(p: tuple[int, int]) -> tuple[int, int] | None:
        r, c = p
        for dr, dc in _RING:
            q = (r + dr, c + dc)
            if q in in_mask and q not in visited:
                return q
        return None

    def walk_from(seed: tuple[int, int]):
        """Walk one direction; returns (path, final pixel or None at a junction)."""
        path: list[tuple[int, int]] = []
        cur = seed
        while True:
            nxt = next_unvisited(cur)
            if nxt is None:
                return path, cur
            path.append(nxt)
            visited.add(nxt)
            if junction[nxt]:
                return path, None
            cur = nxt

    chains: list[EdgeChain] = []
    for seed in pixels:
        if seed in visited:
            continue
        visited.add(seed)
        if junction[seed]:
            chains.append(EdgeChain(polarity, [seed], False))
            continue
        forward, stop = walk_from(seed)
        closed = stop is not None and len(forward) >= 2 and _chebyshev(stop, seed) == 1
        if closed:
            points = [seed] + forward
        else:
            backward, _ = walk_from(seed)
            points = backward[::-1] + [seed] + forward
        chains.append(EdgeChain(polarity, points, closed))
    return chains


def _chebyshev(a: tuple[int, int], b: tuple[int, int]) -> int:
    return max(abs(a[0] - b[0]), abs(a[1] - b[1]))


def detect_corners(
    chains: Sequence[EdgeChain],
    w: int = 4,
    theta_min: float = math.pi / 6,
) -> list[Corner]:
    """Find turning-angle maxima along edge chains.

    The angle at index i is the signed rotation from p(i) - p(i-w) to
    p(i+w) - p(i); closed chains wrap, open chains skip the w indices
    next to each end.  A corner needs |angle| >= theta_min and the
    largest magnitude within its +/-w index window; equal-magnitude
    ties keep the lexicographically smallest pixel, so the corner set
    does not depend on walk direction.  Chains shorter than 2w+1 points
    yield no corners.
    """
    if not isinstance(w, (int, np.integer)) or w < 1:
        raise ValueError(f"w must be an integer >= 1, got {w!r}")
    if not (math.isfinite(theta_min) and theta_min >= 0):
        raise ValueError(f"theta_min must be finite and >= 0, got {theta_min!r}")

    corners: list[Corner] = []
    for chain_id, chain in enumerate(chains):
        pts = np.asarray(chain.points, dtype=np.float64)
        n = len(pts)
        if n < 2 * w + 1:
            continue
        if chain.closed:
            idx = np.arange(n)
            back = pts[idx] - pts[(idx - w) % n]
            fwd = pts[(idx + w) % n] - pts[idx]
            angles = _signed_angles(back, fwd)
            candidates = range(n)
        else:
            angles = np.full(n, np.nan)
            idx = np.arange(w, n - w)
            back = pts[idx] - pts[idx - w]
            fwd = pts[idx + w] - pts[idx]
            angles[idx] = _signed_angles(back, fwd)
            candidates = range(w, n - w)
        mags = np.abs(angles)
        for i in candidates:
            if not mags[i] >= theta_min:
                continue
            if chain.closed:
                window = [(i + k) % n for k in range(-w, w + 1) if k != 0]
            else:
                window = [j for j in range(max(w, i - w), min(n - w, i + w + 1)) if j != i]
            best = True
            for j in window:
                if mags[j] > mags[i]:
                    best = False
                    break
                if mags[j] == mags[i] and chain.points[j] < chain.points[i]:
                    best = False
                    break
            if best:
                corners.append(
                    Corner(
                        position=tuple(chain.points[i]),
                        turning_angle=float(angles[i]),
                        chain_id=chain_id,
                        index_in_chain=i,
                    )
                )
    return corners


def _signed_angles(v1: np.ndarray, v2: np.ndarray) -> np.ndarray:
    cross = v1[:, 0] * v2[:, 1] - v1[:, 1] * v2[:, 0]
    dot = v1[:, 0] * v2[:, 0] + v1[:, 1] * v2[:, 1]
    return np.arctan2(cross, dot)
