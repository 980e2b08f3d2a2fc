"""Raster codecs, the ternary grey encoding and structured writers."""

import json

import numpy as np
import pytest

from triquant.fileio import (
    ImageReadError,
    gray_to_ternary,
    read_image,
    ternary_to_gray,
    to_uint8,
    write_csv,
    write_json,
    write_pgm,
    write_png,
)


def test_ternary_grey_mapping_is_exact():
    t = np.array([[-1, 0, 1], [1, 0, -1]], dtype=np.int8)
    g = ternary_to_gray(t)
    np.testing.assert_array_equal(g, [[0, 128, 255], [255, 128, 0]])
    np.testing.assert_array_equal(gray_to_ternary(g), t)


def test_gray_to_ternary_rejects_other_levels():
    with pytest.raises(ValueError):
        gray_to_ternary(np.array([[0, 127]], dtype=np.uint8))


def test_pgm_round_trip_is_byte_exact(tmp_path):
    rng = np.random.default_rng(501)
    arr = rng.integers(0, 256, size=(17, 23)).astype(np.uint8)
    path = tmp_path / "img.pgm"
    write_pgm(path, arr)
    again = read_image(path)
    np.testing.assert_array_equal(again, arr.astype(np.float64))
    write_pgm(tmp_path / "img2.pgm", to_uint8(again))
    assert path.read_bytes() == (tmp_path / "img2.pgm").read_bytes()


def test_pgm_reader_skips_comments(tmp_path):
    body = bytes(range(6))
    data = b"P5 # magic\n# a comment line\n3 2\n# another\n255\n" + body
    path = tmp_path / "c.pgm"
    path.write_bytes(data)
    arr = read_image(path)
    np.testing.assert_array_equal(arr, np.arange(6, dtype=np.float64).reshape(2, 3))


def test_pgm_reader_rejects_truncation_and_bad_magic(tmp_path):
    good = tmp_path / "good.pgm"
    write_pgm(good, np.zeros((4, 4), dtype=np.uint8))
    truncated = tmp_path / "short.pgm"
    truncated.write_bytes(good.read_bytes()[:-3])
    with pytest.raises(ImageReadError):
        read_image(truncated)
    bad = tmp_path / "bad.pgm"
    bad.write_bytes(b"P6\n2 2\n255\n" + bytes(12))
    with pytest.raises(ImageReadError):
        read_image(bad)
    with pytest.raises(ImageReadError):
        read_image(tmp_path / "missing.pgm")


def test_png_round_trip(tmp_path):
    rng = np.random.default_rng(507)
    arr = rng.integers(0, 256, size=(9, 11)).astype(np.uint8)
    path = tmp_path / "img.png"
    write_png(path, arr)
    np.testing.assert_array_equal(read_image(path), arr.astype(np.float64))


def test_png_colour_reduces_to_luma(tmp_path):
    rgb = np.zeros((2, 2, 3), dtype=np.uint8)
    rgb[0, 0] = (255, 0, 0)
    rgb[0, 1] = (0, 255, 0)
    rgb[1, 0] = (0, 0, 255)
    rgb[1, 1] = (10, 20, 30)
    path = tmp_path / "rgb.png"
    write_png(path, rgb)
    arr = read_image(path)
    expected = np.floor(
        0.299 * rgb[..., 0] + 0.587 * rgb[..., 1] + 0.114 * rgb[..., 2] + 0.5
    )
    np.testing.assert_array_equal(arr, expected)


def test_write_json_is_stable(tmp_path):
    path = tmp_path / "a.json"
    payload = {"schema_version": 1, "items": [{"b": 2, "a": 1}]}
    write_json(path, payload)
    first = path.read_bytes()
    write_json(path, payload)
    assert path.read_bytes() == first
    assert json.loads(first) == payload
    assert first.endswith(b"\n")


def test_write_csv_uses_lf(tmp_path):
    path = tmp_path / "t.csv"
    write_csv(path, ("a", "b"), [(1, 2), (3, 4)])
    data = path.read_bytes()
    assert data == b"a,b\n1,2\n3,4\n"


def test_to_uint8_rounds_and_clips():
    arr = np.array([[-3.0, 0.49, 0.5, 254.6, 300.0]])
    np.testing.assert_array_equal(to_uint8(arr), [[0, 0, 1, 255, 255]])
