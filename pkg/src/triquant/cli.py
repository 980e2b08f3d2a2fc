"""Batch command-line interface for every pipeline stage.

Exit codes: 0 success, 2 unreadable or malformed input image, 3 invalid
parameters or usage, 4 homography estimation failure.
"""

from __future__ import annotations

import math
import time
from pathlib import Path

import click

from . import fileio, render
from .features import detect_corners, extract_edges, gradient_filter, label_regions, trace_chains
from .fileio import ImageReadError
from .geometry import HomographyError, fit_homography, warp_overlay
from .matching import MatchParams, block_match, sad_surface, zncc_surface
from .transform import (
    ORIENTATIONS,
    TransformParams,
    ternary_transform,
    ternary_transform_asymmetric,
    ternary_transform_multiscale,
)


def _transform_options(f):
    f = click.option(
        "--k2",
        type=click.FloatRange(min=0, min_open=True),
        default=4.0,
        show_default=True,
        help="threshold below the local mean",
    )(f)
    f = click.option(
        "--k1",
        type=click.FloatRange(min=0, min_open=True),
        default=4.0,
        show_default=True,
        help="threshold above the local mean",
    )(f)
    f = click.option(
        "--d",
        "d",
        type=click.IntRange(min=1),
        default=12,
        show_default=True,
        help="window half-size in pixels",
    )(f)
    return f


def _common_options(f):
    f = click.option(
        "--seed",
        type=click.IntRange(min=0),
        default=0,
        show_default=True,
        help="random seed for seeded stages",
    )(f)
    f = click.option(
        "--out",
        type=click.Path(file_okay=False, path_type=Path),
        default=Path("."),
        show_default=True,
        help="output directory",
    )(f)
    return f


def _match_options(f):
    for name, default, help_text in reversed(
        [
            ("--dim", 40, "patch half-size in pixels"),
            ("--max-r", 10, "row search radius"),
            ("--max-c", 10, "column search radius"),
            ("--row-stride", 100, "candidate grid row step"),
            ("--col-stride", 50, "candidate grid column step"),
        ]
    ):
        f = click.option(name, type=click.IntRange(min=1), default=default, show_default=True, help=help_text)(f)
    f = click.option(
        "--texture-min",
        type=click.FloatRange(min=0),
        default=1050.0,
        show_default=True,
        help="minimum nonzero-pixel count before matching a patch",
    )(f)
    f = click.option(
        "--sad-max",
        type=click.FloatRange(min=0, min_open=True),
        default=6000.0,
        show_default=True,
        help="acceptance ceiling on the best SAD",
    )(f)
    return f


def _parse_scales(text: str) -> list[TransformParams]:
    scales = []
    for part in text.split(","):
        pieces = part.split(":")
        if len(pieces) != 3:
            raise click.BadParameter(f"expected d:k1:k2, got {part!r}", param_hint="--scales")
        try:
            scales.append(TransformParams(d=int(pieces[0]), k1=float(pieces[1]), k2=float(pieces[2])))
        except ValueError as exc:
            raise click.BadParameter(str(exc), param_hint="--scales")
    return scales


def _parse_orientations(text: str) -> list[str]:
    names = [part.strip() for part in text.split(",") if part.strip()]
    unknown = [n for n in names if n not in ORIENTATIONS]
    if not names or unknown:
        raise click.BadParameter(
            f"expected a comma list drawn from {ORIENTATIONS}", param_hint="--asym"
        )
    return names


def _parse_centre(text: str) -> tuple[int, int]:
    pieces = text.split(",")
    if len(pieces) != 2:
        raise click.BadParameter("expected R,C", param_hint="--surface")
    try:
        return (int(pieces[0]), int(pieces[1]))
    except ValueError:
        raise click.BadParameter("expected integer R,C", param_hint="--surface")


def _out_dir(out: Path) -> Path:
    out.mkdir(parents=True, exist_ok=True)
    return out


@click.group()
def cli() -> None:
    """Ternary local-mean transform, shape features and block matching."""


@cli.command()
@click.argument("image", type=click.Path(path_type=Path))
@_transform_options
@_common_options
@click.option("--scales", default=None, help="comma list of d:k1:k2 triples, finest first")
@click.option("--asym", default=None, help="comma list of half-window orientations")
@click.option(
    "--format",
    "fmt",
    type=click.Choice(["pgm", "png"]),
    default="pgm",
    show_default=True,
    help="output raster format",
)
def transform(image: Path, d: int, k1: float, k2: float, out: Path, seed: int, scales, asym, fmt) -> None:
    """Write the ternary transform of IMAGE as a grey raster.

    Levels map losslessly: -1 to 0, 0 to 128, +1 to 255.
    """
    arr = fileio.read_image(image)
    if scales and asym:
        raise click.UsageError("--scales and --asym cannot be combined")
    if scales:
        t = ternary_transform_multiscale(arr, _parse_scales(scales))
    elif asym:
        t = ternary_transform_asymmetric(arr, TransformParams(d, k1, k2), _parse_orientations(asym))
    else:
        t = ternary_transform(arr, TransformParams(d, k1, k2))
    dest = _out_dir(out) / f"{image.stem}.st.{fmt}"
    grey = fileio.ternary_to_gray(t)
    if fmt == "pgm":
        fileio.write_pgm(dest, grey)
    else:
        fileio.write_png(dest, grey)
    click.echo(dest)


@cli.command()
@click.argument("image", type=click.Path(path_type=Path))
@_transform_options
@_common_options
def regions(image: Path, d: int, k1: float, k2: float, out: Path, seed: int) -> None:
    """Label constant-value regions of the transform of IMAGE."""
    arr = fileio.read_image(image)
    t = ternary_transform(arr, TransformParams(d, k1, k2))
    labels, regs = label_regions(t)
    out = _out_dir(out)
    viz = out / f"{image.stem}.regions.png"
    fileio.write_png(viz, render.region_image(labels))
    dump = out / f"{image.stem}.regions.json"
    fileio.write_json(
        dump,
        {
            "schema_version": fileio.SCHEMA_VERSION,
            "image": {"height": int(arr.shape[0]), "width": int(arr.shape[1])},
            "params": {"d": d, "k1": k1, "k2": k2},
            "regions": [
                {
                    "label": r.label,
                    "value": r.value,
                    "area": r.area,
                    "bbox": list(r.bbox),
                    "centroid": list(r.centroid),
                    "pixels": [list(run) for run in r.pixels],
                }
                for r in regs
            ],
        },
    )
    click.echo(viz)
    click.echo(dump)


@cli.command()
@click.argument("image", type=click.Path(path_type=Path))
@_transform_options
@_common_options
@click.option(
    "--polarity",
    type=click.Choice(["dark", "light"]),
    default="dark",
    show_default=True,
    help="edge polarity to extract",
)
@click.option(
    "--proximity",
    type=click.IntRange(min=1),
    default=2,
    show_default=True,
    help="Chebyshev radius for the opposite polarity",
)
@click.option(
    "--gmin",
    type=click.FloatRange(min=0),
    default=0.0,
    show_default=True,
    help="minimum image gradient to keep an edge pixel",
)
def edges(image: Path, d, k1, k2, out, seed, polarity, proximity, gmin) -> None:
    """Extract polarity edges of the transform of IMAGE."""
    arr = fileio.read_image(image)
    t = ternary_transform(arr, TransformParams(d, k1, k2))
    mask = extract_edges(t, polarity, proximity)
    if gmin > 0:
        mask = gradient_filter(mask, arr, gmin)
    chains = trace_chains(mask, polarity)
    out = _out_dir(out)
    viz = out / f"{image.stem}.edges.pgm"
    fileio.write_pgm(viz, render.mask_image(mask))
    dump = out / f"{image.stem}.edges.json"
    fileio.write_json(
        dump,
        {
            "schema_version": fileio.SCHEMA_VERSION,
            "image": {"height": int(arr.shape[0]), "width": int(arr.shape[1])},
            "params": {
                "d": d,
                "k1": k1,
                "k2": k2,
                "polarity": polarity,
                "proximity": proximity,
                "gmin": gmin,
            },
            "chains": [
                {
                    "polarity": ch.polarity,
                    "closed": ch.closed,
                    "points": [list(p) for p in ch.points],
                }
                for ch in chains
            ],
        },
    )
    click.echo(viz)
    click.echo(dump)


@cli.command()
@click.argument("image", type=click.Path(path_type=Path))
@_transform_options
@_common_options
@click.option(
    "--polarity",
    type=click.Choice(["dark", "light"]),
    default="dark",
    show_default=True,
    help="edge polarity the corners are traced on",
)
@click.option("--proximity", type=click.IntRange(min=1), default=2, show_default=True)
@click.option("--gmin", type=click.FloatRange(min=0), default=0.0, show_default=True)
@click.option(
    "--w",
    "arc",
    type=click.IntRange(min=1),
    default=4,
    show_default=True,
    help="arc half-span in chain steps",
)
@click.option(
    "--theta-min",
    type=click.FloatRange(min=0),
    default=math.pi / 6,
    show_default=True,
    help="minimum turning angle in radians",
)
def corners(image: Path, d, k1, k2, out, seed, polarity, proximity, gmin, arc, theta_min) -> None:
    """Detect turning-angle corners on edge chains of IMAGE."""
    arr = fileio.read_image(image)
    t = ternary_transform(arr, TransformParams(d, k1, k2))
    mask = extract_edges(t, polarity, proximity)
    if gmin > 0:
        mask = gradient_filter(mask, arr, gmin)
    chains = trace_chains(mask, polarity)
    found = detect_corners(chains, w=arc, theta_min=theta_min)
    out = _out_dir(out)
    viz = out / f"{image.stem}.corners.png"
    fileio.write_png(viz, render.corner_image(arr, found))
    dump = out / f"{image.stem}.corners.json"
    fileio.write_json(
        dump,
        {
            "schema_version": fileio.SCHEMA_VERSION,
            "image": {"height": int(arr.shape[0]), "width": int(arr.shape[1])},
            "params": {
                "d": d,
                "k1": k1,
                "k2": k2,
                "polarity": polarity,
                "proximity": proximity,
                "gmin": gmin,
                "w": arc,
                "theta_min": theta_min,
            },
            "corners": [
                {
                    "position": list(c.position),
                    "turning_angle": c.turning_angle,
                    "chain_id": c.chain_id,
                    "index_in_chain": c.index_in_chain,
                }
                for c in found
            ],
        },
    )
    click.echo(viz)
    click.echo(dump)


@cli.command()
@click.argument("image1", type=click.Path(path_type=Path))
@click.argument("image2", type=click.Path(path_type=Path))
@_match_options
@_transform_options
@_common_options
@click.option("--rectify", is_flag=True, help="fit a homography and write the rectified overlay")
@click.option("--surface", "surface_at", default=None, help="also dump score surfaces centred at R,C")
@click.option(
    "--ransac-threshold",
    type=click.FloatRange(min=0, min_open=True),
    default=3.0,
    show_default=True,
    help="inlier reprojection distance in pixels",
)
@click.option(
    "--ransac-iterations",
    type=click.IntRange(min=1),
    default=1000,
    show_default=True,
    help="RANSAC sample count",
)
def match(
    image1: Path,
    image2: Path,
    dim,
    max_r,
    max_c,
    row_stride,
    col_stride,
    texture_min,
    sad_max,
    d,
    k1,
    k2,
    out,
    seed,
    rectify,
    surface_at,
    ransac_threshold,
    ransac_iterations,
) -> None:
    """Block-match the ternary transforms of IMAGE1 and IMAGE2."""
    arr1 = fileio.read_image(image1)
    arr2 = fileio.read_image(image2)
    if arr1.shape != arr2.shape:
        raise click.UsageError(f"input sizes differ: {arr1.shape} vs {arr2.shape}")
    centre = _parse_centre(surface_at) if surface_at else None
    tp = TransformParams(d, k1, k2)
    mp = MatchParams(
        dim=dim,
        max_r=max_r,
        max_c=max_c,
        row_stride=row_stride,
        col_stride=col_stride,
        texture_min=texture_min,
        sad_max=sad_max,
    )
    t1 = ternary_transform(arr1, tp)
    t2 = ternary_transform(arr2, tp)
    matches = block_match(t1, t2, mp)

    out = _out_dir(out)
    base = f"{image1.stem}_{image2.stem}"
    dump = out / f"{base}.matches.json"
    fileio.write_json(
        dump,
        {
            "schema_version": fileio.SCHEMA_VERSION,
            "image": {"height": int(arr1.shape[0]), "width": int(arr1.shape[1])},
            "params": {
                "d": d,
                "k1": k1,
                "k2": k2,
                "dim": dim,
                "max_r": max_r,
                "max_c": max_c,
                "row_stride": row_stride,
                "col_stride": col_stride,
                "texture_min": texture_min,
                "sad_max": sad_max,
            },
            "matches": [
                {"src": list(m.src), "dst": list(m.dst), "score": m.score} for m in matches
            ],
        },
    )
    click.echo(dump)
    viz = out / f"{base}.matches.png"
    fileio.write_png(viz, render.match_image(t1, t2, matches))
    click.echo(viz)

    if centre is not None:
        sad_s = sad_surface(t1, t2, centre, mp)
        zncc_s = zncc_surface(arr1, arr2, centre, mp)
        offsets = ["dr\\dc"] + [str(dc) for dc in range(-mp.max_c, mp.max_c + 1)]
        for surf, tag in ((sad_s, "sad"), (zncc_s, "zncc")):
            rows = [
                [str(surf.origin[0] + i)] + [repr(float(v)) for v in surf.grid[i]]
                for i in range(surf.grid.shape[0])
            ]
            csv_path = out / f"{base}.{tag}.csv"
            fileio.write_csv(csv_path, offsets, rows)
            click.echo(csv_path)
            png_path = out / f"{base}.{tag}.png"
            fileio.write_png(png_path, render.surface_image(surf))
            click.echo(png_path)

    if rectify:
        h, inliers = fit_homography(
            matches, threshold=ransac_threshold, iterations=ransac_iterations, seed=seed
        )
        hom = out / f"{base}.homography.json"
        fileio.write_json(
            hom,
            {
                "schema_version": fileio.SCHEMA_VERSION,
                "matrix": [[float(v) for v in row] for row in h],
                "inliers": inliers,
            },
        )
        click.echo(hom)
        overlay = out / f"{base}.rectified.png"
        fileio.write_png(overlay, fileio.to_uint8(warp_overlay(arr1, arr2, h)))
        click.echo(overlay)


@cli.command()
@click.argument("image", type=click.Path(path_type=Path))
@click.option("--d-list", default="6,12,24", show_default=True, help="comma list of window half-sizes")
@click.option(
    "--repeat",
    type=click.IntRange(min=1),
    default=5,
    show_default=True,
    help="timed repetitions per window size",
)
@click.option("--k1", type=click.FloatRange(min=0, min_open=True), default=4.0, show_default=True)
@click.option("--k2", type=click.FloatRange(min=0, min_open=True), default=4.0, show_default=True)
@_common_options
def bench(image: Path, d_list: str, repeat: int, k1: float, k2: float, out: Path, seed: int) -> None:
    """Time the transform of IMAGE across window sizes.

    One warm-up run per size is not timed; the report has one CSV row
    per size with the mean wall time and throughput.
    """
    arr = fileio.read_image(image)
    try:
        ds = [int(part) for part in d_list.split(",")]
    except ValueError:
        raise click.BadParameter("expected a comma list of integers", param_hint="--d-list")
    all_params = [TransformParams(d=d, k1=k1, k2=k2) for d in ds]
    for p in all_params:
        ternary_transform(arr, p)
    # interleave the repeats so ambient load drift hits every d equally
    times: list[list[float]] = [[] for _ in all_params]
    for _ in range(repeat):
        for slot, p in zip(times, all_params):
            t0 = time.perf_counter()
            ternary_transform(arr, p)
            slot.append(time.perf_counter() - t0)
    rows = []
    for d, slot in zip(ds, times):
        mean_t = sum(slot) / len(slot)
        rows.append((d, f"{mean_t:.9f}", f"{arr.size / mean_t:.3f}"))
    dest = _out_dir(out) / f"{image.stem}.bench.csv"
    fileio.write_csv(dest, ("d", "mean_seconds", "pixels_per_second"), rows)
    click.echo(dest)


def main(argv=None) -> int:
    """Entry point with the documented exit-code contract."""
    try:
        cli.main(args=argv, prog_name="triquant", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.UsageError as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        return 3
    except click.ClickException as exc:
        exc.show()
        return 1
    except ImageReadError as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    except ValueError as exc:
        click.echo(f"error: {exc}", err=True)
        return 3
    except HomographyError as exc:
        click.echo(f"error: homography estimation failed: {exc}", err=True)
        return 4
    return 0
