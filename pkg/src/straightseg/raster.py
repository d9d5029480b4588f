"""Line rasterization and segment overlay rendering (PNG and SVG)."""

import base64
import io
from pathlib import Path

import numpy as np
from PIL import Image as _PILImage

from .image import Image


def bresenham(x0: int, y0: int, x1: int, y1: int) -> list[tuple[int, int]]:
    """Integer line rasterization from (x0, y0) to (x1, y1), endpoints included."""
    points = []
    dx = abs(x1 - x0)
    dy = abs(y1 - y0)
    sx = 1 if x0 < x1 else -1
    sy = 1 if y0 < y1 else -1
    err = dx - dy
    x, y = x0, y0
    while True:
        points.append((x, y))
        if x == x1 and y == y1:
            break
        e2 = 2 * err
        if e2 > -dy:
            err -= dy
            x += sx
        if e2 < dx:
            err += dx
            y += sy
    return points


def _endpoints(segment) -> tuple[int, int, int, int]:
    if hasattr(segment, "x1"):
        return int(segment.x1), int(segment.y1), int(segment.x2), int(segment.y2)
    x1, y1, x2, y2 = segment
    return int(round(x1)), int(round(y1)), int(round(x2)), int(round(y2))


def draw_segments(image: Image, segments, value: float = 255.0) -> Image:
    """Return a copy of the image with segments rasterized at a fixed value.

    Endpoints must lie inside the image bounds.
    """
    out = image.copy()
    h, w = out.shape
    for seg in segments:
        x1, y1, x2, y2 = _endpoints(seg)
        for x, y in ((x1, y1), (x2, y2)):
            if not (0 <= x < w and 0 <= y < h):
                raise ValueError(f"segment endpoint ({x}, {y}) outside {w}x{h} image")
        for x, y in bresenham(x1, y1, x2, y2):
            out.data[y, x] = value
    return out


def save_overlay_png(image: Image, segments, path, value: float = 255.0) -> None:
    overlaid = draw_segments(image, segments, value=value)
    _PILImage.fromarray(overlaid.quantized(), mode="L").save(path, format="PNG")


def save_overlay_svg(image: Image, segments, path, stroke: str = "#ff0000") -> None:
    """Write an SVG 1.1 overlay: the image as an embedded PNG plus one line per segment."""
    buf = io.BytesIO()
    _PILImage.fromarray(image.quantized(), mode="L").save(buf, format="PNG")
    b64 = base64.b64encode(buf.getvalue()).decode("ascii")
    w, h = image.width, image.height
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" xmlns:xlink="http://www.w3.org/1999/xlink" '
        f'version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">',
        f'<image width="{w}" height="{h}" xlink:href="data:image/png;base64,{b64}"/>',
    ]
    for seg in segments:
        x1, y1, x2, y2 = _endpoints(seg)
        parts.append(
            f'<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" '
            f'stroke="{stroke}" stroke-width="1"/>'
        )
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts), encoding="utf-8")


def render_overlay(image: Image, segments, path, value: float = 255.0) -> None:
    """Render segments over the image; output format chosen by file extension."""
    path = Path(path)
    if path.suffix.lower() == ".svg":
        save_overlay_svg(image, segments, path)
    else:
        save_overlay_png(image, segments, path, value=value)
