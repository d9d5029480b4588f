"""Segment extraction: peak picking on summed half-plane length maps,
weighted line refinement, endpoint recovery, and direction retirement.

Seeds are processed strongest-evidence-first; once a segment is emitted, its
direction is retired from the prominent sets of every supporting point, which
is the sole deduplication mechanism. A peak whose refined orientation falls in
the guard band beyond the histogram half-bin tolerance is consumed without
emitting a segment: it belongs to a line outside the searched range.
"""

import csv
import io
import json
import math
from dataclasses import dataclass

import numpy as np

from .config import Params
from .edges import ThetaStore, analyze_edges, build_theta_store
from .geometry import (
    perp_vector,
    point_segment_distance,
    round_half_up,
    signed_angle_diff,
    unit_vector,
    wrap180,
)
from .image import Image
from .lengthmap import FillStats, MapPair, fill_length_maps


@dataclass
class LineSegment:
    """An extracted segment: integer endpoints plus refined line parameters."""

    x1: int
    y1: int
    x2: int
    y2: int
    seed: tuple[int, int]
    theta_n: float
    delta_p: float
    delta_theta: float
    length: int          # Chebyshev extent: plus reach + minus reach
    support: int         # number of candidate matches backing the fit

    @property
    def theta_deg(self) -> float:
        return wrap180(self.theta_n + self.delta_theta)

    def to_dict(self) -> dict:
        return {
            "x1": self.x1,
            "y1": self.y1,
            "x2": self.x2,
            "y2": self.y2,
            "length": self.length,
            "support": self.support,
            "theta_deg": self.theta_deg,
        }


def segments_to_json(segments) -> str:
    return json.dumps([s.to_dict() for s in segments], indent=2) + "\n"


def segments_to_csv(segments) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["x1", "y1", "x2", "y2", "length", "support", "theta_deg"])
    for s in segments:
        d = s.to_dict()
        writer.writerow([d[k] for k in ("x1", "y1", "x2", "y2", "length", "support", "theta_deg")])
    return buf.getvalue()


def non_maxima_suppression(grid: np.ndarray, radius: int = 2, min_value: float = 1):
    """Peaks in decreasing value order, row-major on ties; each extraction
    zeroes the (2*radius+1)^2 neighborhood. Consumes a copy of the grid."""
    work = np.array(grid, copy=True)
    rows, cols = work.shape
    peaks = []
    while True:
        flat = int(work.argmax())
        i, j = divmod(flat, cols)
        value = work[i, j]
        if value < min_value:
            break
        peaks.append((i, j, value))
        work[max(0, i - radius) : i + radius + 1, max(0, j - radius) : j + radius + 1] = 0
    return peaks


def fit_line_weighted(points: np.ndarray, weights: np.ndarray):
    """Weighted total-least-squares line fit.

    Returns (centroid, direction angle in [0, 180)) or None when the weighted
    scatter has no spread (all points coincide).
    """
    w = np.asarray(weights, dtype=np.float64)
    pts = np.asarray(points, dtype=np.float64)
    total = w.sum()
    if total <= 0:
        return None
    centroid = (pts * w[:, None]).sum(axis=0) / total
    centered = pts - centroid
    scatter = (centered * w[:, None]).T @ centered
    if np.allclose(scatter, 0.0):
        return None
    eigvals, eigvecs = np.linalg.eigh(scatter)
    direction = eigvecs[:, int(np.argmax(eigvals))]
    angle = math.degrees(math.atan2(direction[1], direction[0])) % 180.0
    return centroid, angle


def refine_parameters(matches, weights, seed, theta_n: float):
    """Refined (dp, dtheta) from a weighted fit through the candidate matches,
    relative to (seed, theta_n). None when the fit is degenerate."""
    fit = fit_line_weighted(np.asarray(matches, dtype=np.float64), weights)
    if fit is None:
        return None
    centroid, angle = fit
    dtheta = signed_angle_diff(angle, theta_n)
    px, py = perp_vector(theta_n + dtheta)
    dp = (centroid[0] - seed[0]) * px + (centroid[1] - seed[1]) * py
    return dp, dtheta


def _extreme_point(seed, theta: float, reach: int, dp: float, direction: int):
    """Endpoint from the extremes formula: round(seed + reach * v/||v||_inf + dp * v_perp)."""
    vx, vy = unit_vector(theta)
    norm = max(abs(vx), abs(vy))
    px, py = perp_vector(theta)
    x = seed[0] + direction * reach * vx / norm + dp * px
    y = seed[1] + direction * reach * vy / norm + dp * py
    return round_half_up(x), round_half_up(y)


def collect_support(seed, theta_n, grad_sign, dp, dth, reach_plus, reach_minus, store, params):
    """Candidate matches within the uncertainty radius of the line (dp, dth)
    out to the given reaches, with their |derivative| weights."""
    theta = theta_n + dth
    vx, vy = unit_vector(theta)
    norm = max(abs(vx), abs(vy))
    px, py = perp_vector(theta)
    h, w = store.shape
    radius = params.uncertainty_radius
    tol = 2.0 * params.delta_theta
    x0, y0 = seed

    es = np.concatenate(
        [np.zeros(1), np.arange(1, reach_plus + 1), -np.arange(1, reach_minus + 1)]
    )
    bx = x0 + es * (vx / norm) + dp * px
    by = y0 + es * (vy / norm) + dp * py
    cx = np.floor(bx + 0.5).astype(np.int64)
    cy = np.floor(by + 0.5).astype(np.int64)
    offs = np.array([(ox, oy) for oy in (-1, 0, 1) for ox in (-1, 0, 1)])
    qx = (cx[:, None] + offs[None, :, 0]).ravel()
    qy = (cy[:, None] + offs[None, :, 1]).ravel()
    keep = (qx >= 0) & (qx < w) & (qy >= 0) & (qy < h)
    qx, qy = qx[keep], qy[keep]
    packed = np.unique(qy * w + qx)
    qx = packed % w
    qy = packed // w
    dist = np.abs((qx - x0) * px + (qy - y0) * py - dp)
    near = dist <= radius + 1e-9
    qx, qy = qx[near], qy[near]
    if len(qx) == 0:
        return np.empty((0, 2)), np.empty(0), 0.0
    weights = store.match_weights(qx, qy, theta, grad_sign, tol)
    hit = weights >= 0
    points = np.stack([qx[hit], qy[hit]], axis=1).astype(np.float64)
    # fraction of ring positions along the hypothesis holding a match; true
    # rasterized lines match almost every position, accidental texture
    # alignments survive on every-other-ring hops
    along = ((qx[hit] - x0) * vx + (qy[hit] - y0) * vy) * norm
    n_pos = reach_plus + reach_minus + 1
    covered = len(np.unique(np.floor(along + 0.5).astype(np.int64)))
    coverage = covered / n_pos
    return points, weights[hit], coverage


def retire_along_segment(
    endpoints, line_angle: float, grad_sign: int, store: ThetaStore, params
) -> None:
    """Retire the extracted direction from every candidate match near the
    closed segment (given by its unrounded extreme points).

    The angular tolerance matches the one the map filling votes with: any
    entry that could support a re-extraction of this line retires with it.
    The band is the uncertainty radius padded by the worst-case pixel-grid
    rounding, so the whole support set of the emitted segment is covered.
    """
    band = params.uncertainty_radius + 0.75
    tol = 2.0 * params.delta_theta + params.guard_deg
    h, w = store.shape
    x1, y1, x2, y2 = endpoints
    length = math.hypot(x2 - x1, y2 - y1)
    steps = max(1, int(math.ceil(length * 2)))
    pix = set()
    pad = int(math.ceil(band)) + 1
    for t in range(steps + 1):
        fx = x1 + (x2 - x1) * t / steps
        fy = y1 + (y2 - y1) * t / steps
        for oy in range(-pad, pad + 1):
            for ox in range(-pad, pad + 1):
                q = (round_half_up(fx) + ox, round_half_up(fy) + oy)
                if 0 <= q[0] < w and 0 <= q[1] < h:
                    pix.add(q)
    keep = [
        q for q in pix if point_segment_distance(q[0], q[1], x1, y1, x2, y2) <= band + 1e-9
    ]
    if not keep:
        return
    xs = np.array([q[0] for q in keep])
    ys = np.array([q[1] for q in keep])
    store.retire(xs, ys, line_angle, grad_sign, tol)


def _segment_band(seed, theta: float, dp: float, reach_plus: int, reach_minus: int):
    """Closed-segment endpoints (unrounded) for the line (dp, theta) with the
    given half-plane reaches."""
    vx, vy = unit_vector(theta)
    norm = max(abs(vx), abs(vy))
    px, py = perp_vector(theta)
    return (
        seed[0] - reach_minus * vx / norm + dp * px,
        seed[1] - reach_minus * vy / norm + dp * py,
        seed[0] + reach_plus * vx / norm + dp * px,
        seed[1] + reach_plus * vy / norm + dp * py,
    )


def _explained_by_guard(points, guard_lines, band: float, fraction: float = 0.8) -> bool:
    """True when most support points lie within the band of some guard-zone
    line, i.e. the peak is a spurious in-range alias of an out-of-range line."""
    for gx1, gy1, gx2, gy2 in guard_lines:
        covered = sum(
            1
            for qx, qy in points
            if point_segment_distance(qx, qy, gx1, gy1, gx2, gy2) <= band + 1e-9
        )
        if covered >= fraction * len(points):
            return True
    return False


def extract_at(
    seed,
    theta_n: float,
    grad_sign: int,
    pair: MapPair,
    store: ThetaStore,
    params: Params,
    bounds=None,
    claimed=None,
) -> list[LineSegment]:
    """Extract segments from one co-registered map pair via repeated peak
    picking with non-maxima suppression.

    `claimed` carries the bands of lines already identified for this seed and
    direction (emitted segments and guard-zone lines), shared across the
    zoom-split siblings of one fill; peaks whose support those bands explain
    are aliases and are consumed without emission.
    """
    total = pair.plus + pair.minus
    work = total.astype(np.int64, copy=True)
    geom = pair.geometry
    dtheta_limit = params.delta_theta + 1e-9
    segments = []
    guard_lines = claimed if claimed is not None else []
    if bounds is None:
        bounds = store.shape
    h, w = bounds

    while True:
        flat = int(work.argmax())
        i, j = divmod(flat, work.shape[1])
        value = int(work[i, j])
        if value < max(params.min_length, 1):
            break
        r = params.nms_radius
        work[max(0, i - r) : i + r + 1, max(0, j - r) : j + r + 1] = 0

        reach_plus = int(pair.plus[i, j])
        reach_minus = int(pair.minus[i, j])
        dp = float(geom.dp_centers[i])
        dth = float(geom.dth_centers[j])

        points, weights, coverage = collect_support(
            seed, theta_n, grad_sign, dp, dth, reach_plus, reach_minus, store, params
        )
        if len(points) >= 2:
            refined = refine_parameters(points, weights, seed, theta_n)
            if refined is not None:
                dp, dth = refined
        if abs(dth) > dtheta_limit:
            # The voting line lies outside the search range. Remember it:
            # weaker peaks assembled from the same points are spurious.
            guard_lines.append(
                _segment_band(seed, theta_n + dth, dp, reach_plus + params.max_gap,
                              reach_minus + params.max_gap)
            )
            continue
        if guard_lines and len(points) and _explained_by_guard(
            points, guard_lines, params.uncertainty_radius + 0.75
        ):
            continue

        theta = theta_n + dth
        x_plus, y_plus = _extreme_point(seed, theta, reach_plus, dp, +1)
        x_minus, y_minus = _extreme_point(seed, theta, reach_minus, dp, -1)
        x_plus = min(max(x_plus, 0), w - 1)
        y_plus = min(max(y_plus, 0), h - 1)
        x_minus = min(max(x_minus, 0), w - 1)
        y_minus = min(max(y_minus, 0), h - 1)

        length = reach_plus + reach_minus
        support = int(len(points))
        if (
            length < params.min_length
            or support < params.support_ratio * length
            or coverage < params.coverage_min
        ):
            continue

        segment = LineSegment(
            x1=x_minus,
            y1=y_minus,
            x2=x_plus,
            y2=y_plus,
            seed=tuple(seed),
            theta_n=theta_n,
            delta_p=dp,
            delta_theta=dth,
            length=length,
            support=support,
        )
        float_ends = _segment_band(seed, theta, dp, reach_plus, reach_minus)
        retire_along_segment(float_ends, theta, grad_sign, store, params)
        guard_lines.append(float_ends)
        segments.append(segment)
    return segments


@dataclass
class ExtractionResult:
    segments: list
    stats: FillStats
    store: ThetaStore | None = None


def extract_all(image: Image, params: Params) -> ExtractionResult:
    """Run the full pipeline: edge analysis, prominent directions, per-seed
    length maps, and peak extraction with direction retirement."""
    stats = FillStats()
    if image.height < 3 or image.width < 3:
        raise ValueError("image too small for edge analysis")
    maps = analyze_edges(image, params.threshold)
    store = build_theta_store(
        maps,
        bins=params.bins,
        window_radius=params.window_radius,
        prominence_fraction=params.prominence_fraction,
        min_mass=params.prominence_min_mass,
        threads=params.threads,
    )
    segments: list[LineSegment] = []
    for x, y in store.seeds_by_strength():
        for entry in store.live_entries_by_strength(x, y):
            if not store.live[entry.bin_index, y, x]:
                continue
            sign = int(np.sign(entry.grad))
            if sign == 0:
                continue
            pairs = fill_length_maps(
                (x, y), entry.theta, sign, store, store.shape, params, stats=stats
            )
            # Strongest hypothesis first across the zoom-split siblings, so a
            # child tracking a truncated view cannot claim the line's points
            # before the full-length peak is extracted.
            pairs.sort(key=lambda p: -int(p.plus.max() + p.minus.max()))
            claimed: list = []
            for pair in pairs:
                segments.extend(
                    extract_at(
                        (x, y), entry.theta, sign, pair, store, params, claimed=claimed
                    )
                )
    return ExtractionResult(segments, stats, store)
