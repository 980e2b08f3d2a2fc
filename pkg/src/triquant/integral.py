"""Summed-area tables with constant-time box sums and means."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .image import validate_gray


@dataclass(frozen=True)
class IntegralImage:
    """Padded summed-area table of a grey image.

    ``sums`` is (height+1) x (width+1); entry (r, c) holds the total
    intensity over source rows [0, r) and columns [0, c).  The explicit
    zero row and column remove every boundary branch from box queries:
    any rectangle sum is four lookups regardless of its size.
    """

    width: int
    height: int
    sums: np.ndarray

    def box_sum(self, r0: int, c0: int, r1: int, c1: int) -> float:
        """Sum over the inclusive pixel rectangle rows [r0, r1], cols [c0, c1]."""
        if not (0 <= r0 <= r1 < self.height and 0 <= c0 <= c1 < self.width):
            raise ValueError(
                f"rectangle ({r0},{c0})..({r1},{c1}) outside "
                f"{self.height}x{self.width} image"
            )
        s = self.sums
        return float(s[r1 + 1, c1 + 1] - s[r0, c1 + 1] - s[r1 + 1, c0] + s[r0, c0])

    def box_mean(self, r: int, c: int, d: int) -> float:
        """Mean over the (2d+1) x (2d+1) window centred at (r, c).

        The full window must lie inside the image.
        """
        if d < 0:
            raise ValueError(f"half-window must be >= 0, got {d}")
        if not (r - d >= 0 and r + d < self.height and c - d >= 0 and c + d < self.width):
            raise ValueError(
                f"window of half-size {d} at ({r},{c}) leaves the "
                f"{self.height}x{self.width} image"
            )
        q = 2 * d + 1
        return self.box_sum(r - d, c - d, r + d, c + d) / float(q * q)

    def window_means(self, d: int) -> np.ndarray:
        """Means of every fully interior (2d+1) x (2d+1) window, as a grid.

        Entry (i, j) equals box_mean(i + d, j + d, d); the grid covers all
        centres whose window fits, so its shape is (height-2d, width-2d).
        """
        return self.rect_means(d, -d, d, -d, d)

    def rect_means(self, d: int, r_lo: int, r_hi: int, c_lo: int, c_hi: int) -> np.ndarray:
        """Means of an offset rectangle around every interior centre.

        The rectangle at centre (r, c) spans rows [r+r_lo, r+r_hi] and
        cols [c+c_lo, c+c_hi]; offsets must stay within [-d, d].  The grid
        covers the same centres as ``window_means(d)``.
        """
        if d < 0 or 2 * d + 1 > min(self.height, self.width):
            raise ValueError(
                f"window side {2 * d + 1} does not fit a "
                f"{self.height}x{self.width} image"
            )
        if not (-d <= r_lo <= r_hi <= d and -d <= c_lo <= c_hi <= d):
            raise ValueError("rectangle offsets must satisfy -d <= lo <= hi <= d")
        s = self.sums
        r0, r1 = d, self.height - d
        c0, c1 = d, self.width - d
        a = s[r0 + r_hi + 1 : r1 + r_hi + 1, c0 + c_hi + 1 : c1 + c_hi + 1]
        b = s[r0 + r_lo : r1 + r_lo, c0 + c_hi + 1 : c1 + c_hi + 1]
        c = s[r0 + r_hi + 1 : r1 + r_hi + 1, c0 + c_lo : c1 + c_lo]
        e = s[r0 + r_lo : r1 + r_lo, c0 + c_lo : c1 + c_lo]
        area = (r_hi - r_lo + 1) * (c_hi - c_lo + 1)
        return (a - b - c + e) / float(area)


def build_integral(img) -> IntegralImage:
    """Build the summed-area table of a grey image in one pass.

    Accumulation is float64, whose 52-bit mantissa keeps desk-scale
    tables exact: an 8-bit image of 10^8 pixels sums below 2.6e10.
    """
    arr = validate_gray(img)
    h, w = arr.shape
    sums = np.zeros((h + 1, w + 1), dtype=np.float64)
    sums[1:, 1:] = arr.cumsum(axis=0).cumsum(axis=1)
    return IntegralImage(width=w, height=h, sums=sums)
