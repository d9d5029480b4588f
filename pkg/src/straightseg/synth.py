"""Synthetic scenes with exact ground truth, plus the scoring harness.

Generators are deterministic given their seed; images are rendered through
the shared rasterizer so the truth endpoints match the drawn pixels. The RNG
is numpy's PCG64 Generator, so scores are stable across platforms.
"""

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .geometry import angle_distance, point_line_distance
from .image import Image, save_pgm
from .raster import draw_segments


@dataclass
class TruthSegment:
    x1: float
    y1: float
    x2: float
    y2: float

    @property
    def length(self) -> float:
        return math.hypot(self.x2 - self.x1, self.y2 - self.y1)

    @property
    def angle(self) -> float:
        return math.degrees(math.atan2(self.y2 - self.y1, self.x2 - self.x1)) % 180.0

    def to_dict(self) -> dict:
        return {"x1": self.x1, "y1": self.y1, "x2": self.x2, "y2": self.y2}


@dataclass
class Scene:
    image: Image
    truth: list
    noise_sigma: float = 0.0
    rng_seed: int = 0

    def save(self, directory) -> None:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        save_pgm(self.image, directory / "scene.pgm")
        payload = {
            "noise_sigma": self.noise_sigma,
            "rng_seed": self.rng_seed,
            "truth": [t.to_dict() for t in self.truth],
        }
        (directory / "truth.json").write_text(json.dumps(payload, indent=2))


def _chord_through(cx: float, cy: float, angle_deg: float, lo: float, hi: float):
    """Extent of the line through (cx, cy) at angle within [lo, hi]^2."""
    vx = math.cos(math.radians(angle_deg))
    vy = math.sin(math.radians(angle_deg))
    t_min, t_max = -math.inf, math.inf
    for pos, v in ((cx, vx), (cy, vy)):
        if abs(v) < 1e-12:
            continue
        a = (lo - pos) / v
        b = (hi - pos) / v
        t_min = max(t_min, min(a, b))
        t_max = min(t_max, max(a, b))
    return (cx + t_min * vx, cy + t_min * vy, cx + t_max * vx, cy + t_max * vy)


def gen_crossing_lines(
    n: int,
    width: int = 256,
    height: int = 256,
    rng_seed: int = 0,
    background: float = 255.0,
    line_value: float = 0.0,
) -> Scene:
    """Binary image of n long segments with many pairwise crossings.

    Segments come in two near-orthogonal orientation families; lines within a
    family are parallel-separated (they never cross inside the image) while
    every cross-family pair crosses steeply. One-pixel rasterized lines only
    stay gap-connected through a crossing when it is well away from parallel,
    so this layout maximizes crossings without baking raster breaks into the
    ground truth.
    """
    rng = np.random.default_rng(rng_seed)
    image = Image.filled(width, height, background)
    truth = []
    margin = 12.0
    size = min(width, height)
    base = rng.uniform(0.0, 180.0)
    counts = ((n + 1) // 2, n // 2)
    cx0 = (width - 1) / 2.0
    cy0 = (height - 1) / 2.0
    for fam, count in enumerate(counts):
        if count == 0:
            continue
        fam_angle = base + 90.0 * fam
        nx = math.sin(math.radians(fam_angle))
        ny = -math.cos(math.radians(fam_angle))
        if count == 1:
            slots = np.array([0.0])
        else:
            slots = np.linspace(-0.24, 0.24, count)
        for slot in slots:
            angle = (fam_angle + rng.uniform(-2.0, 2.0)) % 180.0
            off = slot * size + rng.uniform(-3.0, 3.0)
            x1, y1, x2, y2 = _chord_through(
                cx0 + off * nx, cy0 + off * ny, angle, margin, size - 1 - margin
            )
            truth.append(TruthSegment(x1, y1, x2, y2))
    image = draw_segments(image, [(t.x1, t.y1, t.x2, t.y2) for t in truth], value=line_value)
    return Scene(image, truth, 0.0, rng_seed)


def gen_textured_boundary(
    kind: str,
    sigma: float,
    rng_seed: int = 0,
    size: int = 256,
    background_mean: float = 170.0,
    region_mean: float = 60.0,
) -> Scene:
    """A flat or textured rectangle occluding a textured background.

    Texture is per-pixel uniform noise of standard deviation sigma added to
    the region mean. The truth is the four rectangle boundary segments.
    """
    if kind not in ("flat-vs-texture", "texture-vs-texture"):
        raise ValueError(f"unknown textured scene kind {kind!r}")
    rng = np.random.default_rng(rng_seed)
    half_span = sigma * math.sqrt(3.0)
    bg = np.full((size, size), background_mean)
    if sigma > 0:
        bg += rng.uniform(-half_span, half_span, size=(size, size))
    lo = size // 4
    hi = size - size // 4 - 1
    region = np.full((hi - lo + 1, hi - lo + 1), region_mean)
    if kind == "texture-vs-texture" and sigma > 0:
        region += rng.uniform(-half_span, half_span, size=region.shape)
    bg[lo : hi + 1, lo : hi + 1] = region
    truth = [
        TruthSegment(lo, lo, hi, lo),
        TruthSegment(hi, lo, hi, hi),
        TruthSegment(hi, hi, lo, hi),
        TruthSegment(lo, hi, lo, lo),
    ]
    return Scene(Image(np.clip(bg, 0, 255)), truth, 0.0, rng_seed)


def gen_segment_grid(
    rows: int = 3,
    cols: int = 3,
    size: int = 160,
    segment_length: int = 40,
    rng_seed: int = 0,
    background: float = 0.0,
    line_value: float = 255.0,
) -> Scene:
    """A grid of disjoint segments with alternating orientations; the fixture
    scene for noise-robustness sweeps."""
    image = Image.filled(size, size, background)
    truth = []
    cell = size / max(rows, cols)
    for r in range(rows):
        for c in range(cols):
            cx = (c + 0.5) * cell
            cy = (r + 0.5) * cell
            angle = (r * cols + c) * 180.0 / (rows * cols)
            vx = math.cos(math.radians(angle))
            vy = math.sin(math.radians(angle))
            x1 = cx - vx * segment_length / 2
            y1 = cy - vy * segment_length / 2
            x2 = cx + vx * segment_length / 2
            y2 = cy + vy * segment_length / 2
            truth.append(TruthSegment(x1, y1, x2, y2))
    image = draw_segments(image, [(t.x1, t.y1, t.x2, t.y2) for t in truth], value=line_value)
    return Scene(image, truth, 0.0, rng_seed)


def add_gaussian_noise(image: Image, sigma: float, rng_seed: int = 0) -> Image:
    """Zero-mean white Gaussian noise, clamped to [0, 255]. sigma=0 is identity."""
    if sigma == 0:
        return image.copy()
    rng = np.random.default_rng(rng_seed)
    noisy = image.data + rng.normal(0.0, sigma, size=image.shape)
    return Image(np.clip(noisy, 0, 255))


@dataclass
class ScoreReport:
    recall: float
    precision: float
    fragmentation: float
    endpoint_error: float
    truth_count: int
    extracted_count: int
    matched_truth: int
    per_truth: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "recall": self.recall,
            "precision": self.precision,
            "fragmentation": self.fragmentation,
            "endpoint_error": self.endpoint_error,
            "truth_count": self.truth_count,
            "extracted_count": self.extracted_count,
            "matched_truth": self.matched_truth,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def _seg_coords(seg):
    if hasattr(seg, "x1"):
        return float(seg.x1), float(seg.y1), float(seg.x2), float(seg.y2)
    x1, y1, x2, y2 = seg
    return float(x1), float(y1), float(x2), float(y2)


def _seg_angle(coords) -> float:
    x1, y1, x2, y2 = coords
    return math.degrees(math.atan2(y2 - y1, x2 - x1)) % 180.0


def score(
    extracted,
    truth,
    angle_tol: float = 2.0,
    perp_tol: float = 2.0,
    coverage_fraction: float = 0.8,
) -> ScoreReport:
    """Greedy one-to-many matching of truth segments to extracted pieces.

    A truth segment is recalled when candidate pieces (angle within angle_tol,
    endpoints within perp_tol of the truth line) jointly cover at least
    coverage_fraction of its length. Pieces that do not extend the covered
    span (e.g. the twin detection on the opposite transition side) are not
    counted toward fragmentation. Endpoint error is the mean distance between
    the truth endpoints and the extreme endpoints of the covering pieces.
    """
    ext = [_seg_coords(s) for s in extracted]
    tru = [_seg_coords(t) for t in truth]
    matched = 0
    frag_counts = []
    endpoint_errors = []
    per_truth = []

    for t in sorted(tru, key=lambda c: -math.hypot(c[2] - c[0], c[3] - c[1])):
        tx1, ty1, tx2, ty2 = t
        tlen = math.hypot(tx2 - tx1, ty2 - ty1)
        if tlen == 0:
            continue
        ux = (tx2 - tx1) / tlen
        uy = (ty2 - ty1) / tlen
        tangle = _seg_angle(t)
        candidates = []
        for e in ext:
            if angle_distance(_seg_angle(e), tangle) > angle_tol:
                continue
            d1 = point_line_distance(e[0], e[1], tx1, ty1, tangle)
            d2 = point_line_distance(e[2], e[3], tx1, ty1, tangle)
            if max(d1, d2) > perp_tol:
                continue
            s1 = (e[0] - tx1) * ux + (e[1] - ty1) * uy
            s2 = (e[2] - tx1) * ux + (e[3] - ty1) * uy
            lo, hi = min(s1, s2), max(s1, s2)
            lo, hi = max(lo, 0.0), min(hi, tlen)
            if hi > lo:
                candidates.append((hi - lo, lo, hi, e))
        candidates.sort(key=lambda c: -c[0])
        covered: list[tuple[float, float]] = []
        pieces = []

        def union_len(intervals) -> float:
            total = 0.0
            last = -math.inf
            for lo, hi in sorted(intervals):
                if hi > last:
                    total += hi - max(lo, last)
                    last = hi
            return total

        base = 0.0
        for clen, lo, hi, e in candidates:
            gain = union_len(covered + [(lo, hi)]) - base
            if gain >= 0.5 * clen and gain > 0:
                covered.append((lo, hi))
                base += gain
                pieces.append((lo, hi, e))
        coverage = base
        recalled = coverage >= coverage_fraction * tlen and pieces
        per_truth.append({"coverage": coverage / tlen, "pieces": len(pieces)})
        if recalled:
            matched += 1
            frag_counts.append(len(pieces))
            lo_piece = min(pieces, key=lambda p: p[0])
            hi_piece = max(pieces, key=lambda p: p[1])

            def end_at(piece, want_lo: bool):
                lo, hi, e = piece
                s1 = (e[0] - tx1) * ux + (e[1] - ty1) * uy
                s2 = (e[2] - tx1) * ux + (e[3] - ty1) * uy
                if (s1 < s2) == want_lo:
                    return e[0], e[1]
                return e[2], e[3]

            ex0, ey0 = end_at(lo_piece, True)
            ex1, ey1 = end_at(hi_piece, False)
            endpoint_errors.append(
                (math.hypot(ex0 - tx1, ey0 - ty1) + math.hypot(ex1 - tx2, ey1 - ty2)) / 2
            )

    true_positive = 0
    for e in ext:
        elen = math.hypot(e[2] - e[0], e[3] - e[1])
        if elen == 0:
            continue
        for t in tru:
            tangle = _seg_angle(t)
            if angle_distance(_seg_angle(e), tangle) > angle_tol:
                continue
            if max(
                point_line_distance(e[0], e[1], t[0], t[1], tangle),
                point_line_distance(e[2], e[3], t[0], t[1], tangle),
            ) > perp_tol:
                continue
            tlen = math.hypot(t[2] - t[0], t[3] - t[1])
            ux = (t[2] - t[0]) / tlen
            uy = (t[3] - t[1]) / tlen
            s1 = (e[0] - t[0]) * ux + (e[1] - t[1]) * uy
            s2 = (e[2] - t[0]) * ux + (e[3] - t[1]) * uy
            lo, hi = min(s1, s2), max(s1, s2)
            overlap = min(hi, tlen) - max(lo, 0.0)
            if overlap >= 0.5 * elen:
                true_positive += 1
                break

    n_truth = len(tru)
    n_ext = len(ext)
    return ScoreReport(
        recall=matched / n_truth if n_truth else 1.0,
        precision=true_positive / n_ext if n_ext else 1.0,
        fragmentation=float(np.mean(frag_counts)) if frag_counts else 0.0,
        endpoint_error=float(np.mean(endpoint_errors)) if endpoint_errors else 0.0,
        truth_count=n_truth,
        extracted_count=n_ext,
        matched_truth=matched,
        per_truth=per_truth,
    )
