"""Classical Hough transform baseline.

Lines are parameterized by rho = x cos(theta) + y sin(theta) with theta in
[0, 180) degrees and rho in [-D, D] for D the image diagonal. Edge points are
the same thresholded-derivative edge points the main extractor uses, keeping
both methods on identical input.
"""

import math
from dataclasses import dataclass

import numpy as np

from .image import Image, save_pgm


@dataclass
class Accumulator:
    bins: np.ndarray        # (n_rho, n_theta) int64
    rho_res: float
    theta_res: float
    rho_offset: int         # bin index of rho = 0

    @property
    def thetas(self) -> np.ndarray:
        return np.arange(self.bins.shape[1]) * self.theta_res

    def rho_of_bin(self, i: int) -> float:
        return (i - self.rho_offset) * self.rho_res


def accumulate(xs, ys, shape, theta_res: float = 1.0, rho_res: float = 1.0) -> Accumulator:
    """Vote accumulation: each edge point adds one vote per theta sample at
    the bin round(rho / rho_res)."""
    h, w = shape
    diag = int(math.ceil(math.hypot(w - 1, h - 1)))
    offset = int(round(diag / rho_res))
    n_rho = 2 * offset + 1
    thetas = np.arange(0.0, 180.0, theta_res)
    bins = np.zeros((n_rho, len(thetas)), dtype=np.int64)
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    for t, theta in enumerate(thetas):
        rad = math.radians(theta)
        rho = xs * math.cos(rad) + ys * math.sin(rad)
        idx = np.floor(rho / rho_res + 0.5).astype(int) + offset
        bins[:, t] += np.bincount(idx, minlength=n_rho)
    return Accumulator(bins, rho_res, theta_res, offset)


@dataclass
class HoughLine:
    rho: float
    theta: float        # normal angle, degrees in [0, 180)
    votes: int
    segments: list      # trimmed (x1, y1, x2, y2) integer spans


def detect_lines(
    acc: Accumulator,
    xs,
    ys,
    top_k: int = 20,
    nms_radius: int = 2,
    max_gap: int = 2,
    min_votes: int = 2,
) -> list[HoughLine]:
    """Top peaks by non-maxima suppression, each trimmed to segments by
    projecting its inlier edge points (distance <= 1 px) onto the line and
    splitting at gaps larger than max_gap."""
    from .extract import non_maxima_suppression

    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    lines = []
    for i, j, votes in non_maxima_suppression(acc.bins, nms_radius, min_votes):
        if len(lines) >= top_k:
            break
        theta = float(j * acc.theta_res)
        rho = acc.rho_of_bin(i)
        rad = math.radians(theta)
        c, s = math.cos(rad), math.sin(rad)
        dist = np.abs(xs * c + ys * s - rho)
        inliers = dist <= 1.0
        segments = []
        if inliers.any():
            # position along the line direction (-sin, cos)
            t = -xs[inliers] * s + ys[inliers] * c
            order = np.argsort(t, kind="stable")
            ix = xs[inliers][order].astype(int)
            iy = ys[inliers][order].astype(int)
            ts = t[order]
            start = 0
            for k in range(1, len(ts) + 1):
                if k == len(ts) or ts[k] - ts[k - 1] > max_gap:
                    if k - start >= 2:
                        segments.append(
                            (int(ix[start]), int(iy[start]), int(ix[k - 1]), int(iy[k - 1]))
                        )
                    start = k
        lines.append(HoughLine(rho, theta, int(votes), segments))
    return lines


def edge_points(image: Image, threshold: float):
    """Edge point coordinates per the shared directional-edge definition."""
    from .edges import analyze_edges

    maps = analyze_edges(image, threshold)
    edge_ys, edge_xs = np.nonzero(maps.edge_any)
    return edge_xs, edge_ys


def save_accumulator_pgm(acc: Accumulator, path) -> None:
    """Votes normalized to [0, 255] as a PGM rendering of the vote space."""
    peak = max(1, int(acc.bins.max()))
    save_pgm(Image(acc.bins.astype(np.float64) * (255.0 / peak)), path)
