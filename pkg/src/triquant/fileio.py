"""File input and output: PGM/PNG rasters, JSON feature dumps, CSV tables.

Every writer goes through a temp-file rename in the destination
directory, so output files appear atomically.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from collections.abc import Iterable, Sequence
from pathlib import Path

import numpy as np
from PIL import Image

SCHEMA_VERSION = 1

_PNG_MAGIC = b"\x89PNG\r\n\x1a\n"
_LUMA = np.array([0.299, 0.587, 0.114])


class ImageReadError(Exception):
    """Input raster missing, unreadable or malformed."""


_TERNARY_TO_GRAY = np.array([0, 128, 255], dtype=np.uint8)


def ternary_to_gray(t) -> np.ndarray:
    """Encode {-1, 0, +1} losslessly as grey levels {0, 128, 255}."""
    arr = np.asarray(t)
    return _TERNARY_TO_GRAY[arr.astype(np.int16) + 1]


def gray_to_ternary(g) -> np.ndarray:
    """Invert ``ternary_to_gray``; any other grey level is rejected."""
    arr = np.asarray(g)
    if not np.isin(arr, (0, 128, 255)).all():
        raise ValueError("grey levels other than 0, 128, 255 cannot be decoded")
    out = np.zeros(arr.shape, dtype=np.int8)
    out[arr == 0] = -1
    out[arr == 255] = 1
    return out


def read_image(path) -> np.ndarray:
    """Read a binary PGM (P5) or PNG file as a float64 grey raster.

    Colour inputs reduce to luma 0.299 R + 0.587 G + 0.114 B, rounded
    to the nearest integer level.
    """
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise ImageReadError(f"cannot read {path}: {exc}") from exc
    if data[:2] == b"P5":
        return _decode_pgm(data, path)
    if data[:8] == _PNG_MAGIC:
        return _decode_png(data, path)
    raise ImageReadError(f"{path}: not a binary PGM (P5) or PNG file")


def _decode_pgm(data: bytes, path: Path) -> np.ndarray:
    pos = 2
    fields: list[int] = []
    n = len(data)
    while len(fields) < 3:
        while pos < n and data[pos : pos + 1].isspace():
            pos += 1
        if pos < n and data[pos : pos + 1] == b"#":
            while pos < n and data[pos] not in (0x0A, 0x0D):
                pos += 1
            continue
        start = pos
        while pos < n and not data[pos : pos + 1].isspace():
            pos += 1
        token = data[start:pos]
        if not token.isdigit():
            raise ImageReadError(f"{path}: malformed PGM header")
        fields.append(int(token))
    width, height, maxval = fields
    if width < 1 or height < 1 or not (1 <= maxval <= 255):
        raise ImageReadError(f"{path}: unsupported PGM geometry or depth")
    pos += 1  # single whitespace byte after maxval
    pixels = data[pos : pos + width * height]
    if len(pixels) < width * height:
        raise ImageReadError(f"{path}: truncated PGM pixel data")
    return np.frombuffer(pixels, dtype=np.uint8).reshape(height, width).astype(np.float64)


def _decode_png(data: bytes, path: Path) -> np.ndarray:
    try:
        with Image.open(io.BytesIO(data)) as im:
            im.load()
            if im.mode == "L":
                arr = np.asarray(im, dtype=np.float64)
            else:
                rgb = np.asarray(im.convert("RGB"), dtype=np.float64)
                arr = np.floor(rgb @ _LUMA + 0.5)
    except ImageReadError:
        raise
    except Exception as exc:
        raise ImageReadError(f"{path}: cannot decode PNG: {exc}") from exc
    if arr.ndim != 2 or arr.size == 0:
        raise ImageReadError(f"{path}: PNG does not decode to a 2-D raster")
    return arr


def write_pgm(path, arr) -> None:
    """Write a 2-D uint8 raster as binary PGM (P5, maxval 255)."""
    a = np.ascontiguousarray(arr, dtype=np.uint8)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-D raster, got shape {a.shape}")
    header = f"P5\n{a.shape[1]} {a.shape[0]}\n255\n".encode("ascii")
    _replace_file(path, header + a.tobytes())


def write_png(path, arr) -> None:
    """Write a 2-D (grey) or HxWx3 (RGB) uint8 raster as PNG."""
    a = np.ascontiguousarray(arr, dtype=np.uint8)
    if a.ndim == 2:
        im = Image.fromarray(a, mode="L")
    elif a.ndim == 3 and a.shape[2] == 3:
        im = Image.fromarray(a, mode="RGB")
    else:
        raise ValueError(f"expected HxW or HxWx3 raster, got shape {a.shape}")
    buf = io.BytesIO()
    im.save(buf, format="PNG")
    _replace_file(path, buf.getvalue())


def write_json(path, payload: dict) -> None:
    """Write one JSON document; key order follows dict insertion order."""
    text = json.dumps(payload, indent=2)
    _replace_file(path, (text + "\n").encode("utf-8"))


def write_csv(path, header: Sequence, rows: Iterable[Sequence]) -> None:
    """Write a CSV table with a header row and LF line endings."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    _replace_file(path, buf.getvalue().encode("utf-8"))


def to_uint8(arr) -> np.ndarray:
    """Round a float raster to uint8, clipping to [0, 255]."""
    return np.clip(np.floor(np.asarray(arr, dtype=np.float64) + 0.5), 0, 255).astype(np.uint8)


def _replace_file(path, data: bytes) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise
