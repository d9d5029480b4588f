"""Independent reference implementations used to check the production code.

These deliberately re-derive results from first principles (full-ring
enumeration, per-cell recurrences, closed-form eigenvectors) instead of
calling into the package's scanning machinery.
"""

import math

import numpy as np


def half_plane_of(dx: int, dy: int, theta_n: float) -> int:
    """+1/-1 half-plane assignment; boundary pixels go to +."""
    c = math.cos(math.radians(theta_n))
    s = math.sin(math.radians(theta_n))
    if abs(c) < 1e-12:
        c = 0.0
    if abs(s) < 1e-12:
        s = 0.0
    return 1 if dx * c + dy * s >= 0 else -1


def chebyshev_ring(e: int):
    """All integer offsets at Chebyshev distance exactly e."""
    out = []
    for dx in range(-e, e + 1):
        for dy in range(-e, e + 1):
            if max(abs(dx), abs(dy)) == e:
                out.append((dx, dy))
    return out


def angle_distance(a: float, b: float) -> float:
    d = abs(a - b) % 180.0
    return min(d, 180.0 - d)


def is_candidate_match(store, x, y, theta_n, sign, tol):
    h, w = store.shape
    if not (0 <= x < w and 0 <= y < h):
        return False
    for entry in store.entries_at(x, y):
        if (
            entry.live
            and np.sign(entry.grad) == sign
            and angle_distance(entry.theta, theta_n) <= tol + 1e-9
        ):
            return True
    return False


def brute_force_length_map(seed, theta_n, half_plane, sign, store, shape, params):
    """Per-cell connectivity-limited reach, computed independently per cell.

    For every (dp, dtheta) cell: walk the equidistant rings outward; at each
    radius the cell advances iff some candidate match in the half-plane covers
    it (its offset interval contains the cell's dp center) and the cell is at
    most max_gap behind. Matches the zoom-disabled fill exactly, by
    construction of identical float expressions.
    """
    h, w = shape
    x0, y0 = seed
    grid = params.grid
    d = params.max_gap
    radius = params.uncertainty_radius
    half_width = params.delta_theta + params.guard_deg
    tol = 2.0 * params.delta_theta + params.guard_deg

    dp_step = (2.0 * params.delta_p) / grid
    dp_centers = -params.delta_p + (np.arange(grid) + 0.5) * dp_step
    dth_step = (2.0 * half_width) / grid
    dth_centers = -half_width + (np.arange(grid) + 0.5) * dth_step
    rad = np.radians(theta_n + dth_centers)
    sin_j = np.sin(rad)
    cos_j = np.cos(rad)

    values = np.zeros((grid, grid), dtype=np.int64)
    max_e = max(x0, w - 1 - x0, y0, h - 1 - y0) + d + 1
    for e in range(1, max_e + 1):
        matches = []
        for dx, dy in chebyshev_ring(e):
            if half_plane_of(dx, dy, theta_n) != half_plane:
                continue
            if is_candidate_match(store, x0 + dx, y0 + dy, theta_n, sign, tol):
                matches.append((dx, dy))
        if matches:
            cover = np.zeros((grid, grid), dtype=bool)
            for dx, dy in matches:
                s = dx * sin_j - dy * cos_j   # per dtheta column
                cover |= (dp_centers[:, None] >= (s - radius)[None, :]) & (
                    dp_centers[:, None] <= (s + radius)[None, :]
                )
            values = np.where(cover & (e - values <= d), e, values)
        if (e + 1) - values.max() > d:
            break
    return values


def brute_force_histogram(maps, seed, bins, window_radius, fraction, min_mass):
    """Direction histogram by direct window enumeration; returns the set of
    prominent bin centers with their selected derivative values."""
    x0, y0 = seed
    h, w = maps.shape
    width = 180.0 / bins
    hist = np.zeros(bins)
    mass = np.zeros(bins)
    r = int(math.floor(window_radius))
    for dy in range(-r, r + 1):
        for dx in range(-r, r + 1):
            if dx == 0 and dy == 0:
                continue
            if dx * dx + dy * dy > window_radius * window_radius:
                continue
            x, y = x0 + dx, y0 + dy
            if not (0 <= x < w and 0 <= y < h):
                continue
            if not (maps.edge[:, y, x] != 0).any():
                continue
            theta = 90.0 if dx == 0 else math.degrees(math.atan2(dy, dx)) % 180.0
            plane = _select_plane(theta)
            val = float(maps.edge[plane, y, x])
            t = theta / width - 0.5
            b0 = math.floor(t)
            frac = t - b0
            for b, wt in ((int(b0) % bins, 1.0 - frac), ((int(b0) + 1) % bins, frac)):
                if wt == 0.0:
                    continue
                hist[b] += wt * val
                mass[b] += wt
    centers = (np.arange(bins) + 0.5) * width
    out = {}
    for b in range(bins):
        if (
            mass[b] > 0
            and abs(hist[b]) >= fraction * mass[b] - 1e-9
            and abs(hist[b]) >= min_mass - 1e-9
        ):
            out[b] = (
                float(centers[b]),
                float(maps.grad[_select_plane(centers[b]), y0, x0]),
                float(abs(hist[b])),
            )
    return out


def _select_plane(theta_rel: float) -> int:
    t = theta_rel % 180.0
    if t <= 22.5 or t > 157.5:
        return 2
    if t <= 67.5:
        return 3
    if t <= 112.5:
        return 0
    return 1


def tls_line_analytic(points, weights):
    """Closed-form weighted orthogonal regression via the 2x2 scatter matrix:
    major-axis angle = atan2(2 Sxy, Sxx - Syy) / 2."""
    pts = np.asarray(points, dtype=np.float64)
    w = np.asarray(weights, dtype=np.float64)
    centroid = (pts * w[:, None]).sum(axis=0) / w.sum()
    centered = pts - centroid
    sxx = (w * centered[:, 0] ** 2).sum()
    syy = (w * centered[:, 1] ** 2).sum()
    sxy = (w * centered[:, 0] * centered[:, 1]).sum()
    angle = 0.5 * math.degrees(math.atan2(2.0 * sxy, sxx - syy)) % 180.0
    return centroid, angle
