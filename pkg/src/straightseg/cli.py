"""Command-line interface: extract / bench / dump subcommands.

Exit codes: 0 success, 1 processing error, 2 usage error.
"""

import dataclasses
import sys
from pathlib import Path

import click

from .config import Params, load_params_file
from .edges import analyze_edges, build_theta_store, dump_edge_pgms, dump_theta_json
from .extract import extract_all, segments_to_csv, segments_to_json
from .image import load_image
from .lengthmap import dump_length_map_csv, fill_length_maps
from .raster import render_overlay, save_overlay_svg
from .synth import (
    add_gaussian_noise,
    gen_crossing_lines,
    gen_segment_grid,
    gen_textured_boundary,
    score,
)

_PARAM_OPTIONS = [
    click.option("--threshold", type=float, default=None, help="Edge threshold T."),
    click.option("--bins", type=int, default=None, help="Orientation histogram bins B."),
    click.option("--window-radius", type=float, default=None, help="Histogram window radius."),
    click.option("--max-gap", type=int, default=None, help="Max gap d between matches."),
    click.option("--uncertainty-radius", type=float, default=None, help="Uncertainty ball radius R."),
    click.option("--grid", type=int, default=None, help="Length map cells per axis G."),
    click.option("--min-length", type=int, default=None, help="Minimum segment length."),
    click.option("--sigma", "noise_sigma", type=float, default=None, help="Gaussian noise sigma."),
    click.option("--seed", "rng_seed", type=int, default=None, help="RNG seed."),
    click.option("--threads", type=int, default=None, help="Worker threads."),
    click.option("--no-zoom", "zoom", flag_value=False, default=None, help="Disable hierarchical zoom."),
    click.option("--config", "config_path", type=click.Path(exists=True), default=None,
                 help="key = value parameter file; flags override it."),
]


def _with_params(fn):
    for opt in reversed(_PARAM_OPTIONS):
        fn = opt(fn)
    return fn


def _build_params(config_path, **flags) -> Params:
    base = Params()
    if config_path:
        base = base.replace(**load_params_file(config_path))
    known = {f.name for f in dataclasses.fields(Params)}
    overrides = {k: v for k, v in flags.items() if k in known and v is not None}
    return base.replace(**overrides).validate()


def _fail(message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(1)


@click.group()
def main():
    """Connected line segment extraction with a classical Hough baseline."""


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--output", "output_path", required=True, type=click.Path(),
              help="Segment list JSON output path.")
@click.option("--csv", "csv_path", type=click.Path(), default=None,
              help="Also write the segment list as CSV.")
@click.option("--overlay", "overlay_path", type=click.Path(), default=None,
              help="Render segments over the image as PNG.")
@click.option("--svg", "svg_path", type=click.Path(), default=None,
              help="Render segments over the image as SVG.")
@click.option("--algorithm", type=click.Choice(["straight", "hough"]), default="straight")
@click.option("--debug", "debug_dir", type=click.Path(), default=None,
              help="Directory for debug dumps (edge maps, vote space).")
@_with_params
def extract(input_path, output_path, csv_path, overlay_path, svg_path, algorithm,
            debug_dir, config_path, **flags):
    """Extract line segments from a grayscale image."""
    try:
        params = _build_params(config_path, algorithm=algorithm, **flags)
        image = load_image(input_path)
        if params.algorithm == "hough":
            from .hough import accumulate, detect_lines, edge_points, save_accumulator_pgm

            xs, ys = edge_points(image, params.threshold)
            acc = accumulate(xs, ys, image.shape, params.hough_theta_res, params.hough_rho_res)
            lines = detect_lines(acc, xs, ys, params.top_k, params.nms_radius, params.max_gap)
            segments = [
                _HoughSegment(x1, y1, x2, y2, line.theta)
                for line in lines
                for (x1, y1, x2, y2) in line.segments
            ]
            segments = [s for s in segments if s.length >= params.min_length]
            if debug_dir:
                Path(debug_dir).mkdir(parents=True, exist_ok=True)
                save_accumulator_pgm(acc, Path(debug_dir) / "accumulator.pgm")
        else:
            result = extract_all(image, params)
            segments = [s for s in result.segments if s.length >= params.min_length]
            if debug_dir:
                out = Path(debug_dir)
                out.mkdir(parents=True, exist_ok=True)
                dump_edge_pgms(analyze_edges(image, params.threshold), out)
                dump_theta_json(result.store, out / "theta.json")
        Path(output_path).write_text(segments_to_json(segments))
        if csv_path:
            Path(csv_path).write_text(segments_to_csv(segments))
        if overlay_path:
            render_overlay(image, segments, overlay_path)
        if svg_path:
            save_overlay_svg(image, segments, svg_path)
    except (ValueError, OSError) as exc:
        _fail(str(exc))


class _HoughSegment:
    """Adapter giving Hough spans the segment-list serialization interface."""

    def __init__(self, x1, y1, x2, y2, theta_normal):
        self.x1, self.y1, self.x2, self.y2 = x1, y1, x2, y2
        self.theta_deg = (theta_normal + 90.0) % 180.0
        self.length = max(abs(x2 - x1), abs(y2 - y1))
        self.support = self.length

    def to_dict(self):
        return {
            "x1": self.x1, "y1": self.y1, "x2": self.x2, "y2": self.y2,
            "length": self.length, "support": self.support, "theta_deg": self.theta_deg,
        }


_SCENES = ("crossing", "flat-texture", "texture-texture", "grid")


@main.command()
@click.option("--scene", required=True, help=f"Scene kind: {', '.join(_SCENES)}.")
@click.option("--n", "n_lines", type=int, default=8, help="Segments for the crossing scene.")
@click.option("--size", type=int, default=256, help="Scene side length, pixels.")
@click.option("--output", "output_path", required=True, type=click.Path(),
              help="Score report JSON output path.")
@click.option("--algorithm", type=click.Choice(["straight", "truth"]), default="straight",
              help="'truth' scores the ground truth against itself (harness check).")
@click.option("--save-scene", "scene_dir", type=click.Path(), default=None,
              help="Directory to save the generated scene and truth.")
@_with_params
def bench(scene, n_lines, size, output_path, algorithm, scene_dir, config_path, **flags):
    """Generate a synthetic scene, run extraction, and score it."""
    if scene not in _SCENES:
        raise click.UsageError(f"unknown scene kind {scene!r} (choose from {', '.join(_SCENES)})")
    try:
        params = _build_params(config_path, **flags)
        if scene == "crossing":
            generated = gen_crossing_lines(n_lines, size, size, params.rng_seed)
        elif scene == "grid":
            generated = gen_segment_grid(size=size, rng_seed=params.rng_seed)
        else:
            kind = "flat-vs-texture" if scene == "flat-texture" else "texture-vs-texture"
            generated = gen_textured_boundary(kind, params.noise_sigma, params.rng_seed, size)
        image = generated.image
        if scene in ("crossing", "grid") and params.noise_sigma > 0:
            image = add_gaussian_noise(image, params.noise_sigma, params.rng_seed)
        if scene_dir:
            generated.save(scene_dir)
        if algorithm == "truth":
            extracted = generated.truth
        else:
            extracted = [
                s for s in extract_all(image, params).segments
                if s.length >= params.min_length
            ]
        report = score(extracted, generated.truth)
        Path(output_path).write_text(report.to_json())
        click.echo(
            f"recall={report.recall:.3f} precision={report.precision:.3f} "
            f"fragmentation={report.fragmentation:.3f} endpoint_error={report.endpoint_error:.3f}"
        )
    except (ValueError, OSError) as exc:
        _fail(str(exc))


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--seed-x", type=int, required=True, help="Seed pixel x (column).")
@click.option("--seed-y", type=int, required=True, help="Seed pixel y (row).")
@click.option("--outdir", required=True, type=click.Path())
@_with_params
def dump(input_path, seed_x, seed_y, outdir, config_path, **flags):
    """Dump edge maps, prominent directions, and the seed's length maps."""
    try:
        params = _build_params(config_path, **flags)
        image = load_image(input_path)
        maps = analyze_edges(image, params.threshold)
        if not maps.edge_any.any():
            _fail("no edge points in image")
        h, w = maps.shape
        if not (0 <= seed_x < w and 0 <= seed_y < h) or not maps.edge_any[seed_y, seed_x]:
            _fail(f"seed pixel ({seed_x}, {seed_y}) is not an edge point")
        out = Path(outdir)
        out.mkdir(parents=True, exist_ok=True)
        dump_edge_pgms(maps, out)
        store = build_theta_store(
            maps,
            params.bins,
            params.window_radius,
            params.prominence_fraction,
            params.prominence_min_mass,
            params.threads,
        )
        dump_theta_json(store, out / "theta.json")
        import numpy as np

        wrote = 0
        for entry in store.live_entries_by_strength(seed_x, seed_y):
            sign = int(np.sign(entry.grad))
            if sign == 0:
                continue
            pairs = fill_length_maps(
                (seed_x, seed_y), entry.theta, sign, store, store.shape, params
            )
            for idx, pair in enumerate(pairs):
                for hp, tag in ((1, "plus"), (-1, "minus")):
                    name = f"lengthmap_t{entry.theta:.2f}_{tag}_{idx}.csv"
                    dump_length_map_csv(pair.half(hp), out / name)
                    wrote += 1
        if wrote == 0:
            _fail(f"seed pixel ({seed_x}, {seed_y}) has no live prominent directions")
        click.echo(f"wrote {wrote} length map dumps to {out}")
    except (ValueError, OSError) as exc:
        _fail(str(exc))


if __name__ == "__main__":
    main()
