"""Region labelling, edge extraction, chain tracing and corner checks."""

import math

import numpy as np
import pytest

from triquant import (
    EdgeChain,
    TransformParams,
    detect_corners,
    extract_edges,
    gradient_filter,
    label_regions,
    ternary_transform,
    trace_chains,
)

from oracles import edges_reference, flood_fill_labels, random_ternary


def _ring_mask(size: int, top: int = 2, left: int = 2, side: int = 8) -> np.ndarray:
    mask = np.zeros((size, size), dtype=bool)
    mask[top, left : left + side] = True
    mask[top + side - 1, left : left + side] = True
    mask[top : top + side, left] = True
    mask[top : top + side, left + side - 1] = True
    return mask


# ---------------------------------------------------------------- regions


def test_single_region_for_uniform_image():
    t = np.ones((6, 9), dtype=np.int8)
    labels, regions = label_regions(t)
    assert len(regions) == 1
    region = regions[0]
    assert region.label == 1
    assert region.value == 1
    assert region.area == 54
    assert region.bbox == (0, 0, 5, 8)
    assert region.centroid == (2.5, 4.0)
    assert np.all(labels == 1)


def test_checkerboard_gives_singletons():
    t = np.indices((8, 8)).sum(axis=0) % 2
    t = (t * 2 - 1).astype(np.int8)  # alternating -1 / +1
    labels, regions = label_regions(t)
    assert len(regions) == 64
    assert all(r.area == 1 for r in regions)
    # raster-first-encounter numbering: labels increase along the scan
    np.testing.assert_array_equal(labels.ravel(), np.arange(1, 65))


def test_partition_matches_flood_fill_oracle():
    rng = np.random.default_rng(211)
    for _ in range(20):
        t = random_ternary(rng, 48, 48)
        labels, regions = label_regions(t)
        np.testing.assert_array_equal(labels, flood_fill_labels(t))
        assert sum(r.area for r in regions) == 48 * 48


def test_region_records_are_consistent():
    rng = np.random.default_rng(223)
    t = random_ternary(rng, 32, 32)
    labels, regions = label_regions(t)
    for region in regions:
        member = labels == region.label
        assert member.sum() == region.area
        rows, cols = np.nonzero(member)
        assert region.bbox == (rows.min(), cols.min(), rows.max(), cols.max())
        assert region.bbox[0] <= region.centroid[0] <= region.bbox[2]
        assert region.bbox[1] <= region.centroid[1] <= region.bbox[3]
        assert np.all(t[member] == region.value)
        rebuilt = np.zeros_like(member)
        total = 0
        for r, start, length in region.pixels:
            rebuilt[r, start : start + length] = True
            total += length
        assert total == region.area
        np.testing.assert_array_equal(rebuilt, member)


# ------------------------------------------------------------------ edges


def test_half_plane_dark_edge_is_single_column():
    t = np.full((10, 10), -1, dtype=np.int8)
    t[:, 5:] = 1
    mask = extract_edges(t, "dark")
    expected = np.zeros((10, 10), dtype=bool)
    expected[:, 4] = True
    np.testing.assert_array_equal(mask, expected)


def test_all_dark_image_has_no_edges():
    t = np.full((9, 9), -1, dtype=np.int8)
    assert not extract_edges(t, "dark").any()
    assert not extract_edges(t, "light").any()


def test_gap_width_controls_reachability():
    """Blobs either side of a zero gap: the boundary pixel sees the
    opposite polarity iff gap + 1 <= proximity, per the Chebyshev rule."""
    for gap in range(0, 5):
        for proximity in (1, 2, 3):
            t = np.zeros((7, 12 + gap), dtype=np.int8)
            t[:, :4] = -1
            t[:, 4 + gap :] = 1
            mask = extract_edges(t, "dark", proximity)
            assert mask.any() == (gap + 1 <= proximity)
            np.testing.assert_array_equal(mask, edges_reference(t, "dark", proximity))


def test_edges_match_bruteforce_on_random_inputs():
    rng = np.random.default_rng(227)
    for _ in range(10):
        t = random_ternary(rng, 24, 24)
        for polarity in ("dark", "light"):
            for proximity in (1, 2, 3):
                np.testing.assert_array_equal(
                    extract_edges(t, polarity, proximity),
                    edges_reference(t, polarity, proximity),
                )


def test_polarity_mirror():
    rng = np.random.default_rng(229)
    t = random_ternary(rng, 30, 30)
    np.testing.assert_array_equal(
        extract_edges(-t, "dark"), extract_edges(t, "light")
    )


def test_dark_and_light_edges_disjoint():
    rng = np.random.default_rng(233)
    t = random_ternary(rng, 40, 40)
    dark = extract_edges(t, "dark")
    light = extract_edges(t, "light")
    assert not (dark & light).any()
    assert np.all(t[dark] == -1)
    assert np.all(t[light] == 1)


def test_extract_edges_validation():
    t = np.zeros((5, 5), dtype=np.int8)
    with pytest.raises(ValueError):
        extract_edges(t, "bright")
    with pytest.raises(ValueError):
        extract_edges(t, "dark", 0)


# -------------------------------------------------------- gradient filter


def test_gradient_filter_zero_threshold_keeps_everything():
    rng = np.random.default_rng(239)
    mask = rng.random((12, 12)) < 0.3
    img = rng.integers(0, 256, size=(12, 12)).astype(np.float64)
    np.testing.assert_array_equal(gradient_filter(mask, img, 0.0), mask)


def test_gradient_filter_constant_image_clears_mask():
    mask = np.ones((8, 8), dtype=bool)
    img = np.full((8, 8), 99.0)
    assert not gradient_filter(mask, img, 1.0).any()


def test_gradient_filter_step_threshold():
    """Unit step of height 100: the central difference at the two columns
    flanking the step is 50, so the mask survives gmin 40 and dies at 60."""
    img = np.zeros((10, 10))
    img[:, 5:] = 100.0
    mask = np.zeros((10, 10), dtype=bool)
    mask[:, 4:6] = True
    assert gradient_filter(mask, img, 40.0).sum() == mask.sum()
    assert gradient_filter(mask, img, 60.0).sum() == 0


def test_gradient_filter_validation():
    with pytest.raises(ValueError):
        gradient_filter(np.ones((4, 4), dtype=bool), np.zeros((5, 5)), 1.0)
    with pytest.raises(ValueError):
        gradient_filter(np.ones((4, 4), dtype=bool), np.zeros((4, 4)), -1.0)


# ----------------------------------------------------------------- chains


def test_horizontal_run_is_one_open_chain():
    mask = np.zeros((5, 20), dtype=bool)
    mask[2, 4:14] = True
    chains = trace_chains(mask)
    assert len(chains) == 1
    chain = chains[0]
    assert not chain.closed
    assert chain.points == [(2, c) for c in range(4, 14)]


def test_square_ring_is_one_closed_chain():
    mask = _ring_mask(12)
    chains = trace_chains(mask)
    assert len(chains) == 1
    chain = chains[0]
    assert chain.closed
    assert len(chain.points) == int(mask.sum())
    assert len(set(chain.points)) == len(chain.points)
    pts = chain.points + [chain.points[0]]
    for a, b in zip(pts, pts[1:]):
        assert max(abs(a[0] - b[0]), abs(a[1] - b[1])) == 1


def test_chains_partition_random_masks():
    rng = np.random.default_rng(241)
    for _ in range(20):
        mask = rng.random((20, 20)) < 0.18
        chains = trace_chains(mask)
        seen = set()
        for chain in chains:
            for a, b in zip(chain.points, chain.points[1:]):
                assert max(abs(a[0] - b[0]), abs(a[1] - b[1])) == 1
            for p in chain.points:
                assert p not in seen
                seen.add(p)
        assert seen == set(zip(*map(list, np.nonzero(mask)))) or seen == {
            (int(r), int(c)) for r, c in zip(*np.nonzero(mask))
        }


def test_t_junction_splits_chains():
    mask = np.zeros((9, 9), dtype=bool)
    mask[4, 1:8] = True
    mask[5:8, 4] = True
    chains = trace_chains(mask)
    covered = {p for chain in chains for p in chain.points}
    assert covered == {(int(r), int(c)) for r, c in zip(*np.nonzero(mask))}
    assert len(chains) >= 2
    assert all(not chain.closed for chain in chains)


def test_trace_is_deterministic():
    rng = np.random.default_rng(251)
    mask = rng.random((25, 25)) < 0.2
    first = trace_chains(mask)
    second = trace_chains(mask)
    assert [(c.points, c.closed) for c in first] == [(c.points, c.closed) for c in second]


# ---------------------------------------------------------------- corners


def test_straight_chain_has_no_corners():
    chain = EdgeChain("dark", [(3, c) for c in range(20)], False)
    assert detect_corners([chain]) == []


def test_right_angle_bend_is_one_corner():
    points = [(0, c) for c in range(10)] + [(r, 9) for r in range(1, 10)]
    chain = EdgeChain("dark", points, False)
    corners = detect_corners([chain], w=4)
    assert len(corners) == 1
    corner = corners[0]
    assert corner.position == (0, 9)
    assert abs(corner.turning_angle) == pytest.approx(math.pi / 2)
    assert corner.chain_id == 0
    assert corner.index_in_chain == 9


def test_square_boundary_has_four_corners():
    side = 20
    mask = _ring_mask(26, top=3, left=3, side=side)
    chains = trace_chains(mask, "light")
    assert len(chains) == 1 and chains[0].closed
    corners = detect_corners(chains, w=4)
    assert len(corners) == 4
    true_corners = {(3, 3), (3, 22), (22, 3), (22, 22)}
    for corner in corners:
        dist = min(
            max(abs(corner.position[0] - r), abs(corner.position[1] - c))
            for r, c in true_corners
        )
        assert dist <= 2


def test_corner_set_invariant_under_reversal():
    rng = np.random.default_rng(257)
    mask = _ring_mask(18, top=2, left=4, side=9)
    chains = trace_chains(mask)
    forward = detect_corners(chains, w=3)
    reversed_chains = [
        EdgeChain(c.polarity, list(reversed(c.points)), c.closed) for c in chains
    ]
    backward = detect_corners(reversed_chains, w=3)
    assert {c.position for c in forward} == {c.position for c in backward}
    fwd = {c.position: c.turning_angle for c in forward}
    bwd = {c.position: c.turning_angle for c in backward}
    for pos, angle in fwd.items():
        assert bwd[pos] == pytest.approx(-angle)


def test_short_chains_yield_nothing():
    chain = EdgeChain("dark", [(0, 0), (0, 1), (1, 2), (2, 2)], False)
    assert detect_corners([chain], w=4) == []


def test_theta_min_gates_shallow_bends():
    # 45 degree bend: east run then diagonal run
    points = [(5, c) for c in range(10)] + [(5 + k, 9 + k) for k in range(1, 10)]
    chain = EdgeChain("dark", points, False)
    assert len(detect_corners([chain], w=4, theta_min=math.pi / 6)) == 1
    assert detect_corners([chain], w=4, theta_min=math.pi / 2) == []


def test_detect_corners_validation():
    with pytest.raises(ValueError):
        detect_corners([], w=0)
    with pytest.raises(ValueError):
        detect_corners([], theta_min=-0.5)


# ------------------------------------------------- pipeline sanity check


def test_square_pipeline_corner_positions():
    """Bright 40x40 square on black, full pipeline on light edges."""
    img = np.zeros((100, 100))
    img[30:70, 30:70] = 255.0
    t = ternary_transform(img, TransformParams(d=6))
    mask = extract_edges(t, "light")
    chains = trace_chains(mask, "light")
    corners = detect_corners(chains, w=4)
    assert len(corners) == 4
    true_corners = [(30, 30), (30, 69), (69, 30), (69, 69)]
    for expected in true_corners:
        best = min(
            math.hypot(c.position[0] - expected[0], c.position[1] - expected[1])
            for c in corners
        )
        assert best <= 3.0
