"""Directional edge analysis: oriented derivatives, signed ternary edge maps,
and per-edge-point prominent direction sets from local orientation histograms.

The four derivative planes are directional central differences along the
kernel angles 0/45/90/135 degrees:

    grad_theta(p) = I(p - u_theta) - I(p + u_theta)

with pixel steps u_0 = (1,0), u_45 = (1,1), u_90 = (0,1), u_135 = (-1,1)
in (x, y) = (column, row) coordinates. Only relative signs along a segment
matter downstream, so the global sign convention is internal but consistent
across all four planes. The one-pixel border has no kernel support and is
kept at zero.
"""

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .geometry import angle_distance, cell_centers
from .image import Image, save_pgm

KERNEL_ANGLES = (0.0, 45.0, 90.0, 135.0)
_STEPS = ((1, 0), (1, 1), (0, 1), (-1, 1))


def directional_derivatives(image: Image) -> np.ndarray:
    """Four oriented derivative planes, shape (4, H, W), border frame zeroed."""
    h, w = image.shape
    if h < 3 or w < 3:
        raise ValueError(f"image must be at least 3x3 for edge analysis, got {w}x{h}")
    data = image.data
    grads = np.zeros((4, h, w), dtype=np.float64)
    for k, (ux, uy) in enumerate(_STEPS):
        # I(p - u) - I(p + u) over the interior
        grads[k, 1:-1, 1:-1] = (
            data[1 - uy : h - 1 - uy, 1 - ux : w - 1 - ux]
            - data[1 + uy : h - 1 + uy, 1 + ux : w - 1 + ux]
        )
    return grads


def threshold_edges(grads: np.ndarray, threshold: float) -> np.ndarray:
    """Ternary edge planes in {-1, 0, +1}: sign of derivatives at |grad| >= T."""
    if threshold <= 0:
        raise ValueError("edge threshold must be > 0")
    edges = np.zeros(grads.shape, dtype=np.int8)
    edges[grads >= threshold] = 1
    edges[grads <= -threshold] = -1
    return edges


@dataclass
class EdgeMaps:
    """Derivative planes, thresholded edge planes, and the threshold used."""

    grad: np.ndarray   # (4, H, W) float64
    edge: np.ndarray   # (4, H, W) int8
    threshold: float

    @property
    def shape(self) -> tuple[int, int]:
        return self.grad.shape[1:]

    @property
    def edge_any(self) -> np.ndarray:
        """Boolean mask of edge points (some plane nonzero)."""
        return (self.edge != 0).any(axis=0)


def analyze_edges(image: Image, threshold: float) -> EdgeMaps:
    grads = directional_derivatives(image)
    return EdgeMaps(grads, threshold_edges(grads, threshold), threshold)


def select_directional_map(theta_rel: float) -> int:
    """Index (into the 0/45/90/135 plane stack) of the edge map whose kernel
    direction is closest to the perpendicular of the given orientation."""
    t = theta_rel % 180.0
    if t <= 22.5 or t > 157.5:
        return 2   # 90 degrees
    if t <= 67.5:
        return 3   # 135 degrees
    if t <= 112.5:
        return 0   # 0 degrees
    return 1       # 45 degrees


@lru_cache(maxsize=8)
def _window_table(radius: float, bins: int):
    """Per-offset lookup tables for the circular histogram window.

    For every integer offset (dx, dy) with 0 < ||.||_2 <= radius: the selected
    edge plane, the two bracketing orientation bins, and their linear weights.
    """
    r = int(math.floor(radius))
    offs, planes, b0s, b1s, w0s, w1s = [], [], [], [], [], []
    width = 180.0 / bins
    for dy in range(-r, r + 1):
        for dx in range(-r, r + 1):
            if dx == 0 and dy == 0:
                continue
            if dx * dx + dy * dy > radius * radius:
                continue
            if dx == 0:
                theta = 90.0
            else:
                theta = math.degrees(math.atan2(dy, dx)) % 180.0
            t = theta / width - 0.5
            b0 = math.floor(t)
            frac = t - b0
            offs.append((dx, dy))
            planes.append(select_directional_map(theta))
            b0s.append(int(b0) % bins)
            b1s.append((int(b0) + 1) % bins)
            w0s.append(1.0 - frac)
            w1s.append(frac)
    return (
        tuple(offs),
        tuple(planes),
        tuple(b0s),
        tuple(b1s),
        tuple(w0s),
        tuple(w1s),
    )


@dataclass
class DirectionEntry:
    """One prominent direction at an edge point."""

    bin_index: int
    theta: float       # bin center angle, degrees in [0, 180)
    grad: float        # selected derivative value at the point
    magnitude: float   # absolute histogram count backing the entry
    live: bool = True


class ThetaStore:
    """Prominent-direction sets for every edge point, backed by dense arrays.

    Layout is (B, H, W) per attribute so per-bin gathers over pixel batches
    are contiguous. Entries are only ever retired (live -> False) during one
    extraction run, never re-added.
    """

    def __init__(self, bins: int, prominent, live, grad, magnitude, edge_any):
        self.bins = bins
        self.bin_centers = cell_centers(0.0, 180.0, bins)
        self.grad_sign = np.sign(grad).astype(np.int8)
        self.prominent = prominent
        self.live = live
        self.grad = grad
        self.magnitude = magnitude
        self.edge_any = edge_any
        self._near_cache: dict = {}

    @property
    def shape(self) -> tuple[int, int]:
        return self.prominent.shape[1:]

    def near_bins(self, theta: float, tol: float) -> tuple[int, ...]:
        """Bins whose center is within tol degrees (circularly) of theta."""
        cached = self._near_cache.get((theta, tol))
        if cached is not None:
            return cached
        width = 180.0 / self.bins
        spread = int(math.floor(tol / width)) + 1
        b0 = int(math.floor(theta / width - 0.5))
        out = []
        for db in range(-spread, spread + 1):
            b = (b0 + db) % self.bins
            if angle_distance(float(self.bin_centers[b]), theta) <= tol + 1e-9:
                out.append(b)
        result = tuple(sorted(set(out)))
        if len(self._near_cache) > 65536:
            self._near_cache.clear()
        self._near_cache[(theta, tol)] = result
        return result

    def entries_at(self, x: int, y: int) -> list[DirectionEntry]:
        out = []
        for b in np.nonzero(self.prominent[:, y, x])[0]:
            out.append(
                DirectionEntry(
                    bin_index=int(b),
                    theta=float(self.bin_centers[b]),
                    grad=float(self.grad[b, y, x]),
                    magnitude=float(self.magnitude[b, y, x]),
                    live=bool(self.live[b, y, x]),
                )
            )
        return out

    def match_mask(self, xs, ys, theta: float, sign: int, tol: float) -> np.ndarray:
        """Vectorized candidate-match test for pixel batches.

        True where some live prominent entry has a bin center within tol of
        theta and a matching derivative sign.
        """
        ok = np.zeros(len(xs), dtype=bool)
        for b in self.near_bins(theta, tol):
            ok |= (
                self.prominent[b, ys, xs]
                & self.live[b, ys, xs]
                & (self.grad_sign[b, ys, xs] == sign)
            )
        return ok

    def match_weights(self, xs, ys, theta: float, sign: int, tol: float) -> np.ndarray:
        """Per-pixel max |derivative| among matching live entries; -1 where none."""
        best = np.full(len(xs), -1.0)
        for b in self.near_bins(theta, tol):
            ok = (
                self.prominent[b, ys, xs]
                & self.live[b, ys, xs]
                & (self.grad_sign[b, ys, xs] == sign)
            )
            w = np.abs(self.grad[b, ys, xs])
            best = np.where(ok & (w > best), w, best)
        return best

    def best_match_weight(self, x: int, y: int, theta: float, sign: int, tol: float):
        """Largest |derivative| among matching live entries at one pixel, or None."""
        best = None
        for b in self.near_bins(theta, tol):
            if (
                self.prominent[b, y, x]
                and self.live[b, y, x]
                and self.grad_sign[b, y, x] == sign
            ):
                w = abs(float(self.grad[b, y, x]))
                if best is None or w > best:
                    best = w
        return best

    def retire(self, xs, ys, theta: float, sign: int, tol: float) -> None:
        """Retire matching live entries at the given pixels."""
        for b in self.near_bins(theta, tol):
            mask = self.prominent[b, ys, xs] & (self.grad_sign[b, ys, xs] == sign)
            self.live[b, ys[mask], xs[mask]] = False

    def seeds_by_strength(self) -> list[tuple[int, int]]:
        """Edge points with at least one prominent direction, strongest first,
        ties broken row-major. Returned as (x, y) pairs."""
        strength = np.where(self.prominent, self.magnitude, 0.0).max(axis=0)
        ys, xs = np.nonzero(self.prominent.any(axis=0))
        order = np.lexsort((xs, ys, -strength[ys, xs]))
        return [(int(xs[i]), int(ys[i])) for i in order]

    def live_entries_by_strength(self, x: int, y: int) -> list[DirectionEntry]:
        entries = [e for e in self.entries_at(x, y) if e.live]
        entries.sort(key=lambda e: (-e.magnitude, e.bin_index))
        return entries

    def to_json_dict(self) -> dict:
        out = {}
        ys, xs = np.nonzero(self.prominent.any(axis=0))
        for x, y in zip(xs.tolist(), ys.tolist()):
            out[f"{x},{y}"] = [
                {
                    "theta": e.theta,
                    "grad": e.grad,
                    "live": e.live,
                    "magnitude": e.magnitude,
                }
                for e in self.entries_at(x, y)
            ]
        return out


def candidate_match_test(
    store: ThetaStore, p, line_angle: float, seed_sign: int, tol: float
) -> bool:
    """True iff the pixel holds a live prominent entry whose angular tolerance
    interval overlaps the line's (separation <= tol) with matching sign."""
    x, y = p
    h, w = store.shape
    if not (0 <= x < w and 0 <= y < h):
        return False
    return store.best_match_weight(x, y, line_angle, seed_sign, tol) is not None


def _accumulate_offsets(maps: EdgeMaps, table, index_range, bins: int):
    """Histogram and per-bin mass accumulation for a slice of window offsets."""
    offs, planes, b0s, b1s, w0s, w1s = table
    h, w = maps.shape
    hist = np.zeros((bins, h, w), dtype=np.float64)
    mass = np.zeros((bins, h, w), dtype=np.float64)
    edge_any = maps.edge_any
    for i in index_range:
        dx, dy = offs[i]
        src_y0, src_y1 = max(0, dy), min(h, h + dy)
        src_x0, src_x1 = max(0, dx), min(w, w + dx)
        dst_y0, dst_y1 = max(0, -dy), min(h, h - dy)
        dst_x0, dst_x1 = max(0, -dx), min(w, w - dx)
        val = maps.edge[planes[i], src_y0:src_y1, src_x0:src_x1].astype(np.float64)
        present = edge_any[src_y0:src_y1, src_x0:src_x1].astype(np.float64)
        for b, wt in ((b0s[i], w0s[i]), (b1s[i], w1s[i])):
            if wt == 0.0:
                continue
            hist[b, dst_y0:dst_y1, dst_x0:dst_x1] += wt * val
            mass[b, dst_y0:dst_y1, dst_x0:dst_x1] += wt * present
    return hist, mass


def build_theta_store(
    maps: EdgeMaps,
    bins: int = 32,
    window_radius: float = 7.0,
    prominence_fraction: float = 0.5,
    min_mass: float = 2.0,
    threads: int = 1,
) -> ThetaStore:
    """Prominent-direction sets for all edge points at once.

    A bin is prominent when the magnitude of its signed, distance-weighted
    count reaches prominence_fraction of the total weight contributed to it
    (the intensity transitions along that direction agree in sign) and
    carries at least min_mass points' worth of evidence; directions backed
    by a lone neighbor are not predominant and only feed accidental
    alignments in textured scenes.
    """
    table = _window_table(window_radius, bins)
    n_off = len(table[0])
    # Fixed chunking regardless of worker count keeps the float accumulation
    # order, and hence the output, independent of the --threads setting.
    chunks = [c for c in np.array_split(np.arange(n_off), 16) if len(c)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(
                pool.map(lambda ix: _accumulate_offsets(maps, table, ix, bins), chunks)
            )
    else:
        parts = [_accumulate_offsets(maps, table, ix, bins) for ix in chunks]
    hist, mass = parts[0]
    for h_part, m_part in parts[1:]:
        hist += h_part
        mass += m_part

    edge_any = maps.edge_any
    prominent = (mass > 0) & (np.abs(hist) >= prominence_fraction * mass - 1e-9)
    prominent &= np.abs(hist) >= min_mass - 1e-9
    prominent &= edge_any[None, :, :]

    centers = cell_centers(0.0, 180.0, bins)
    plane_for_bin = [select_directional_map(c) for c in centers]
    grad = np.stack([maps.grad[plane_for_bin[b]] for b in range(bins)]).astype(np.float64)
    magnitude = np.abs(hist)
    return ThetaStore(bins, prominent, prominent.copy(), grad, magnitude, edge_any)


def prominent_directions(
    maps: EdgeMaps,
    seed,
    bins: int = 32,
    window_radius: float = 7.0,
    prominence_fraction: float = 0.5,
    min_mass: float = 2.0,
) -> list[DirectionEntry]:
    """Prominent-direction set for a single edge point (the per-seed contract).

    The seed's own edge value does not contribute to its histogram.
    """
    x0, y0 = seed
    h, w = maps.shape
    if not (0 <= x0 < w and 0 <= y0 < h) or not maps.edge_any[y0, x0]:
        raise ValueError(f"seed ({x0}, {y0}) is not an edge point")
    offs, planes, b0s, b1s, w0s, w1s = _window_table(window_radius, bins)
    hist = np.zeros(bins)
    mass = np.zeros(bins)
    edge_any = maps.edge_any
    for i, (dx, dy) in enumerate(offs):
        x, y = x0 + dx, y0 + dy
        if not (0 <= x < w and 0 <= y < h) or not edge_any[y, x]:
            continue
        val = float(maps.edge[planes[i], y, x])
        for b, wt in ((b0s[i], w0s[i]), (b1s[i], w1s[i])):
            if wt == 0.0:
                continue
            hist[b] += wt * val
            mass[b] += wt
    centers = cell_centers(0.0, 180.0, bins)
    entries = []
    for b in range(bins):
        if (
            mass[b] > 0
            and abs(hist[b]) >= prominence_fraction * mass[b] - 1e-9
            and abs(hist[b]) >= min_mass - 1e-9
        ):
            entries.append(
                DirectionEntry(
                    bin_index=b,
                    theta=float(centers[b]),
                    grad=float(maps.grad[select_directional_map(centers[b]), y0, x0]),
                    magnitude=float(abs(hist[b])),
                )
            )
    return entries


def theta_store_from_entries(shape, bins: int, entries: dict) -> ThetaStore:
    """Build a store from explicit {(x, y): [(theta, grad), ...]} data.

    Intended for synthetic fixtures; theta values snap to the nearest bin.
    """
    h, w = shape
    prominent = np.zeros((bins, h, w), dtype=bool)
    grad = np.zeros((bins, h, w), dtype=np.float64)
    magnitude = np.zeros((bins, h, w), dtype=np.float64)
    edge_any = np.zeros((h, w), dtype=bool)
    centers = cell_centers(0.0, 180.0, bins)
    for (x, y), items in entries.items():
        edge_any[y, x] = True
        for theta, g in items:
            b = int(np.argmin([angle_distance(c, theta) for c in centers]))
            prominent[b, y, x] = True
            grad[b, y, x] = g
            magnitude[b, y, x] = abs(g)
    return ThetaStore(bins, prominent, prominent.copy(), grad, magnitude, edge_any)


def dump_edge_pgms(maps: EdgeMaps, outdir) -> list:
    """Debug dump: each ternary plane as PGM with -1 -> 0, 0 -> 128, +1 -> 255."""
    from pathlib import Path

    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = []
    for k, angle in enumerate(KERNEL_ANGLES):
        img = Image((maps.edge[k].astype(np.float64) + 1.0) * 127.5)
        path = outdir / f"edges_{int(angle):03d}.pgm"
        save_pgm(img, path)
        paths.append(path)
    return paths


def dump_theta_json(store: ThetaStore, path) -> None:
    from pathlib import Path

    Path(path).write_text(json.dumps(store.to_json_dict(), indent=2))
