"""Length maps: the connectivity-enforcing replacement for the Hough
accumulator.

For one (seed, direction, half-plane) triple, a G x G grid over local line
parameters (dp, dtheta) holds the integer reach e achieved by each line
hypothesis. The image is scanned along Chebyshev-equidistant rings of growing
radius; every candidate match stamps its update region (the parameter cells
whose lines cross the match's uncertainty ball) with the current radius,
but only where the previous value is at most max_gap behind - that is the
connectivity requirement. Scanning stops once the whole map goes stale.

The hierarchical mode periodically crops the map to the bounding box of the
still-updatable cells and resamples it to the fixed grid size by nearest
neighbor, so resolution grows while distant rings shrink to short arcs.
"""

import csv
import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np

from .geometry import cell_centers, round_half_up, unit_vector


@dataclass
class MapGeometry:
    """Parameter ranges and discretization shared by a co-registered map pair."""

    theta_n: float
    dp_lo: float
    dp_hi: float
    dth_lo: float
    dth_hi: float
    grid: int
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def dp_centers(self) -> np.ndarray:
        if "dp" not in self._cache:
            self._cache["dp"] = cell_centers(self.dp_lo, self.dp_hi, self.grid)
        return self._cache["dp"]

    @property
    def dth_centers(self) -> np.ndarray:
        if "dth" not in self._cache:
            self._cache["dth"] = cell_centers(self.dth_lo, self.dth_hi, self.grid)
        return self._cache["dth"]

    @property
    def trig(self) -> tuple[np.ndarray, np.ndarray]:
        """sin/cos of the absolute angles sampled by the dtheta columns."""
        if "trig" not in self._cache:
            rad = np.radians(self.theta_n + self.dth_centers)
            self._cache["trig"] = (np.sin(rad), np.cos(rad))
        return self._cache["trig"]


@dataclass
class LengthMap:
    """One half-plane length map."""

    seed: tuple[int, int]
    theta_n: float
    half_plane: int                  # +1 or -1
    geometry: MapGeometry
    values: np.ndarray               # (grid, grid) int32; rows = dp, cols = dtheta
    zoom_depth: int = 0


@dataclass
class MapPair:
    """Co-registered half-plane maps sharing one geometry and zoom history."""

    seed: tuple[int, int]
    theta_n: float
    geometry: MapGeometry
    plus: np.ndarray
    minus: np.ndarray
    zoom_depth: int = 0
    stopped_e: int = 0

    def half(self, sign: int) -> LengthMap:
        vals = self.plus if sign > 0 else self.minus
        return LengthMap(self.seed, self.theta_n, sign, self.geometry, vals, self.zoom_depth)


@dataclass
class UpdateRegion:
    """Clipped dp intervals, one per sampled dtheta, plus the covered cell mask."""

    intervals: list          # per column: (lo, hi) or None after clipping
    cell_mask: np.ndarray    # (grid, grid) bool; rows = dp cells, cols = dtheta cells
    radius: float

    @property
    def empty(self) -> bool:
        return not self.cell_mask.any()


def update_region(seed, theta_n, p, radius, dp_range, dth_range, grid) -> UpdateRegion:
    """Update region of pixel p in the (dp, dtheta) map of (seed, theta_n).

    For each sampled dtheta the line offsets that cross the pixel's
    uncertainty ball span exactly 2 * radius before clipping:

        dp = (x - x0) sin(theta_n + dtheta) - (y - y0) cos(theta_n + dtheta) +- R
    """
    x0, y0 = seed
    x, y = p
    dx, dy = x - x0, y - y0
    geom = MapGeometry(theta_n, dp_range[0], dp_range[1], dth_range[0], dth_range[1], grid)
    sin_j, cos_j = geom.trig
    s = dx * sin_j - dy * cos_j
    dp_c = geom.dp_centers
    cell_mask = (dp_c[:, None] >= (s - radius)[None, :]) & (
        dp_c[:, None] <= (s + radius)[None, :]
    )
    intervals = []
    for j in range(grid):
        lo = max(s[j] - radius, dp_range[0])
        hi = min(s[j] + radius, dp_range[1])
        intervals.append((lo, hi) if lo <= hi else None)
    return UpdateRegion(intervals, cell_mask, radius)


@lru_cache(maxsize=1024)
def ring_offsets(e: int) -> tuple[np.ndarray, np.ndarray]:
    """The 8e pixel offsets at Chebyshev distance e, in cyclic walk order."""
    ys_right = np.arange(-e, e + 1)
    xs_top = np.arange(e - 1, -e - 1, -1)
    ys_left = np.arange(e - 1, -e - 1, -1)
    xs_bottom = np.arange(-e + 1, e)
    dx = np.concatenate(
        [np.full(2 * e + 1, e), xs_top, np.full(2 * e, -e), xs_bottom]
    )
    dy = np.concatenate(
        [ys_right, np.full(2 * e, e), ys_left, np.full(2 * e - 1, -e)]
    )
    dx.setflags(write=False)
    dy.setflags(write=False)
    return dx, dy


def _ring_index(dx: int, dy: int, e: int) -> int:
    """Position of an offset within the cyclic ring order."""
    if dx == e:
        return dy + e
    if dy == e:
        return (2 * e + 1) + (e - 1 - dx)
    if dx == -e:
        return (4 * e + 1) + (e - 1 - dy)
    return (6 * e + 1) + (dx - (-e + 1))

def ring_center_offset(theta_n: float, half_plane: int, e: int) -> tuple[int, int]:
    """Rounded offset of the search-range center pixel on ring e."""
    vx, vy = unit_vector(theta_n)
    norm = max(abs(vx), abs(vy))
    sgn = 1 if half_plane > 0 else -1
    return (
        round_half_up(sgn * e * vx / norm),
        round_half_up(sgn * e * vy / norm),
    )


def equidistant_curve(
    seed,
    theta_n: float,
    half_plane: int,
    e: int,
    geometry: MapGeometry | None = None,
    radius: float = 1.0,
    search_filter: bool = True,
) -> list[tuple[int, int]]:
    """Pixels of the Chebyshev ring e in the given half-plane, ordered from
    the center of the search range outward: center first, then one arm to the
    search-range limit, then the other arm.
    """
    x0, y0 = seed
    vx, vy = unit_vector(theta_n)
    dxs, dys = ring_offsets(e)
    if search_filter:
        if geometry is None:
            raise ValueError("search_filter requires a MapGeometry")
        sin_j, cos_j = geometry.trig
        s = dxs[:, None] * sin_j[None, :] - dys[:, None] * cos_j[None, :]
        in_range = (
            (s + radius >= geometry.dp_centers[0])
            & (s - radius <= geometry.dp_centers[-1])
        ).any(axis=1)
    else:
        in_range = np.ones(len(dxs), dtype=bool)
    dot = dxs * vx + dys * vy
    in_half = dot >= 0 if half_plane > 0 else dot < 0

    cx, cy = ring_center_offset(theta_n, half_plane, e)
    idx0 = _ring_index(cx, cy, e)
    n = len(dxs)

    def passes(i: int) -> bool:
        return bool(in_half[i] and in_range[i])

    out = []
    if passes(idx0):
        out.append((x0 + int(dxs[idx0]), y0 + int(dys[idx0])))
    for step in (1, -1):
        for k in range(1, n):
            i = (idx0 + step * k) % n
            if not passes(i):
                break
            out.append((x0 + int(dxs[i]), y0 + int(dys[i])))
    return out


@dataclass
class FillStats:
    """Work counters for one extraction run."""

    scanned_pixels: int = 0
    fills: int = 0
    rings: int = 0
    splits: int = 0


def _connected_boxes(mask: np.ndarray) -> list[tuple[int, int, int, int]]:
    """Bounding boxes (i0, i1, j0, j1) of the 4-connected components of mask,
    ordered by first cell in row-major order."""
    visited = np.zeros_like(mask, dtype=bool)
    boxes = []
    rows, cols = mask.shape
    for si, sj in zip(*np.nonzero(mask)):
        if visited[si, sj]:
            continue
        stack = [(int(si), int(sj))]
        visited[si, sj] = True
        i0 = i1 = int(si)
        j0 = j1 = int(sj)
        while stack:
            i, j = stack.pop()
            i0, i1 = min(i0, i), max(i1, i)
            j0, j1 = min(j0, j), max(j1, j)
            for ni, nj in ((i - 1, j), (i + 1, j), (i, j - 1), (i, j + 1)):
                if 0 <= ni < rows and 0 <= nj < cols and mask[ni, nj] and not visited[ni, nj]:
                    visited[ni, nj] = True
                    stack.append((ni, nj))
        boxes.append((i0, i1, j0, j1))
    return boxes


def _nn_indices(old_lo: float, old_hi: float, new_lo: float, new_hi: float, grid: int) -> np.ndarray:
    """For each new cell center, the index of the old cell containing it."""
    centers = cell_centers(new_lo, new_hi, grid)
    step = (old_hi - old_lo) / grid
    idx = np.floor((centers - old_lo) / step).astype(int)
    return np.clip(idx, 0, grid - 1)


def zoom(length_map: LengthMap, current_e: int, max_gap: int) -> list[LengthMap]:
    """Split one map into per-component maps zoomed onto the updatable cells.

    Updatable cells hold a value within max_gap of the current ring radius.
    Each 4-connected component's bounding box becomes the child's parameter
    range, resampled to the fixed grid size by nearest neighbor.
    """
    mask = length_map.values >= current_e - max_gap
    if not mask.any():
        return []
    children = []
    for i0, i1, j0, j1 in _connected_boxes(mask):
        geo, vals = _zoom_box(length_map.geometry, (length_map.values,), i0, i1, j0, j1)
        children.append(
            LengthMap(
                length_map.seed,
                length_map.theta_n,
                length_map.half_plane,
                geo,
                vals[0],
                length_map.zoom_depth + 1,
            )
        )
    return children


def _zoom_box(geometry: MapGeometry, value_grids, i0, i1, j0, j1):
    g = geometry.grid
    dp_step = (geometry.dp_hi - geometry.dp_lo) / g
    dth_step = (geometry.dth_hi - geometry.dth_lo) / g
    new = MapGeometry(
        geometry.theta_n,
        geometry.dp_lo + i0 * dp_step,
        geometry.dp_lo + (i1 + 1) * dp_step,
        geometry.dth_lo + j0 * dth_step,
        geometry.dth_lo + (j1 + 1) * dth_step,
        g,
    )
    rows = _nn_indices(geometry.dp_lo, geometry.dp_hi, new.dp_lo, new.dp_hi, g)
    cols = _nn_indices(geometry.dth_lo, geometry.dth_hi, new.dth_lo, new.dth_hi, g)
    resampled = tuple(vals[np.ix_(rows, cols)].copy() for vals in value_grids)
    return new, resampled


def _zoom_pair(pair: MapPair, current_e: int, max_gap: int) -> list[MapPair]:
    """Joint zoom of a co-registered pair on the union of updatable cells."""
    mask = (pair.plus >= current_e - max_gap) | (pair.minus >= current_e - max_gap)
    if not mask.any():
        return [pair]
    boxes = _connected_boxes(mask)
    if len(boxes) == 1 and boxes[0] == (0, 0 + pair.geometry.grid - 1, 0, pair.geometry.grid - 1):
        return [pair]  # whole grid still updatable: identity zoom
    children = []
    for i0, i1, j0, j1 in boxes:
        geo, (vp, vm) = _zoom_box(pair.geometry, (pair.plus, pair.minus), i0, i1, j0, j1)
        children.append(
            MapPair(pair.seed, pair.theta_n, geo, vp, vm, pair.zoom_depth + 1, pair.stopped_e)
        )
    return children


def fill_length_maps(
    seed,
    theta_n: float,
    grad_sign: int,
    store,
    shape,
    params,
    stats: FillStats | None = None,
    zoom_enabled: bool | None = None,
) -> list[MapPair]:
    """Fill both half-plane maps for one seed and prominent direction.

    Runs the two half-plane scans in lockstep over the ring radius so the
    maps stay co-registered; the zoom checkpoints (at radii zoom_base,
    2*zoom_base, ...) crop to the union of the two updatable regions. A pair
    stops once neither map holds a value within max_gap of the ring radius.
    """
    if zoom_enabled is None:
        zoom_enabled = params.zoom
    if stats is not None:
        stats.fills += 1
    h, w = shape
    x0, y0 = seed
    d = params.max_gap
    radius = params.uncertainty_radius
    half_width = params.delta_theta + params.guard_deg
    grid = params.grid

    geom = MapGeometry(theta_n, -params.delta_p, params.delta_p, -half_width, half_width, grid)
    zeros = np.zeros((grid, grid), dtype=np.int32)
    pairs = [MapPair(seed, theta_n, geom, zeros.copy(), zeros.copy())]
    finished: list[MapPair] = []

    vx, vy = unit_vector(theta_n)
    match_tol = 2.0 * params.delta_theta + params.guard_deg
    max_e = max(x0, w - 1 - x0, y0, h - 1 - y0) + d + 1
    next_zoom = params.zoom_base

    e = 1
    while pairs and e <= max_e:
        dxs, dys = ring_offsets(e)
        xs = x0 + dxs
        ys = y0 + dys
        inb = (xs >= 0) & (xs < w) & (ys >= 0) & (ys < h)
        cand = np.zeros(len(dxs), dtype=bool)
        if inb.any():
            cand[inb] = store.match_mask(xs[inb], ys[inb], theta_n, grad_sign, match_tol)
        dot = dxs * vx + dys * vy
        if stats is not None:
            stats.rings += len(pairs)

        for pair in pairs:
            sin_j, cos_j = pair.geometry.trig
            dp_c = pair.geometry.dp_centers
            s = dxs[:, None] * sin_j[None, :] - dys[:, None] * cos_j[None, :]
            in_range = ((s + radius >= dp_c[0]) & (s - radius <= dp_c[-1])).any(axis=1)
            for sign_hp, vals in ((1, pair.plus), (-1, pair.minus)):
                in_half = dot >= 0 if sign_hp > 0 else dot < 0
                sel = in_range & in_half & inb
                if stats is not None:
                    stats.scanned_pixels += int(sel.sum())
                for k in np.nonzero(sel & cand)[0]:
                    sk = s[k]
                    cover = (dp_c[:, None] >= (sk - radius)[None, :]) & (
                        dp_c[:, None] <= (sk + radius)[None, :]
                    )
                    vals[cover & (e - vals <= d)] = e

        survivors = []
        for pair in pairs:
            best = max(int(pair.plus.max()), int(pair.minus.max()))
            if (e + 1) - best > d:
                pair.stopped_e = e
                finished.append(pair)
            else:
                survivors.append(pair)
        pairs = survivors

        if zoom_enabled and pairs and e == next_zoom:
            next_zoom *= 2
            rezoomed = []
            for pair in pairs:
                children = _zoom_pair(pair, e, d)
                if stats is not None and len(children) > 1:
                    stats.splits += len(children) - 1
                rezoomed.extend(children)
            pairs = rezoomed
        e += 1

    for pair in pairs:  # ran out of image before stalling
        pair.stopped_e = e - 1
        finished.append(pair)
    return finished


def dump_length_map_csv(length_map: LengthMap, path) -> None:
    """Debug dump: grid values as CSV plus a JSON sidecar with the ranges."""
    path = Path(path)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for row in length_map.values:
            writer.writerow(int(v) for v in row)
    header = {
        "seed": list(length_map.seed),
        "theta_n": length_map.theta_n,
        "half_plane": length_map.half_plane,
        "dp_range": [length_map.geometry.dp_lo, length_map.geometry.dp_hi],
        "dtheta_range": [length_map.geometry.dth_lo, length_map.geometry.dth_hi],
        "grid": length_map.geometry.grid,
        "zoom_depth": length_map.zoom_depth,
    }
    path.with_suffix(".json").write_text(json.dumps(header, indent=2))
