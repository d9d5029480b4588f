"""Small shared helpers for angles, grids, and pixel geometry.

Coordinates are (x, y) with x = column index and y = row index; angles are
measured in degrees in that frame and line orientations live on [0, 180).
"""

import math

import numpy as np

_SNAP = 1e-12


def wrap180(angle_deg: float) -> float:
    """Map an orientation angle to [0, 180)."""
    return angle_deg % 180.0


def angle_distance(a: float, b: float) -> float:
    """Circular distance between two undirected orientations, in degrees."""
    d = abs(a - b) % 180.0
    return min(d, 180.0 - d)


def signed_angle_diff(a: float, b: float) -> float:
    """Signed offset a - b folded into [-90, 90)."""
    return (a - b + 90.0) % 180.0 - 90.0


def unit_vector(angle_deg: float) -> tuple[float, float]:
    """(cos, sin) with near-zero components snapped to exactly 0.

    Snapping makes the cardinal directions exact so that half-plane
    membership and ring-center rounding do not depend on trig rounding noise.
    """
    c = math.cos(math.radians(angle_deg))
    s = math.sin(math.radians(angle_deg))
    if abs(c) < _SNAP:
        c = 0.0
    if abs(s) < _SNAP:
        s = 0.0
    return c, s


def perp_vector(angle_deg: float) -> tuple[float, float]:
    """Unit vector orthogonal to the direction angle: (sin, -cos)."""
    c, s = unit_vector(angle_deg)
    return s, -c


def round_half_up(x: float) -> int:
    """Deterministic nearest-integer rounding (halves go up)."""
    return int(math.floor(x + 0.5))


def cell_centers(lo: float, hi: float, n: int) -> np.ndarray:
    """Centers of n equal cells spanning [lo, hi]."""
    step = (hi - lo) / n
    return lo + (np.arange(n) + 0.5) * step


def point_segment_distance(px, py, x1, y1, x2, y2) -> float:
    """Euclidean distance from (px, py) to the closed segment (x1,y1)-(x2,y2)."""
    dx = x2 - x1
    dy = y2 - y1
    len2 = dx * dx + dy * dy
    if len2 == 0:
        return math.hypot(px - x1, py - y1)
    t = ((px - x1) * dx + (py - y1) * dy) / len2
    t = min(1.0, max(0.0, t))
    return math.hypot(px - (x1 + t * dx), py - (y1 + t * dy))


def point_line_distance(px, py, x0, y0, angle_deg: float) -> float:
    """Distance from (px, py) to the infinite line through (x0, y0) at angle_deg."""
    sx, sy = perp_vector(angle_deg)
    return abs((px - x0) * sx + (py - y0) * sy)
