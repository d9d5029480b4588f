import numpy as np
import pytest

from straightseg import Image, bresenham, draw_segments, load_image, render_overlay
from straightseg.raster import save_overlay_svg


def test_bresenham_endpoints_and_connectivity():
    pts = bresenham(2, 3, 11, 7)
    assert pts[0] == (2, 3) and pts[-1] == (11, 7)
    for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
        assert max(abs(x1 - x0), abs(y1 - y0)) == 1


def test_empty_overlay_identical_reencode(tmp_path):
    rng = np.random.default_rng(0)
    img = Image(rng.integers(0, 256, size=(12, 10)).astype(np.float64))
    out = tmp_path / "o.png"
    render_overlay(img, [], out)
    assert (load_image(out).data == img.data).all()


def test_vertical_segment_changes_exactly_ten_pixels(tmp_path):
    img = Image.filled(10, 10, 0.0)
    out = tmp_path / "o.png"
    render_overlay(img, [(0, 0, 0, 9)], out, value=255.0)
    changed = (load_image(out).data != img.data).sum()
    assert changed == len(bresenham(0, 0, 0, 9)) == 10


def test_overlay_preserves_dimensions(tmp_path):
    img = Image.filled(17, 9, 10.0)
    out = tmp_path / "o.png"
    render_overlay(img, [(1, 1, 15, 7)], out)
    assert load_image(out).shape == (9, 17)


def test_out_of_bounds_endpoint_rejected():
    img = Image.filled(10, 10, 0.0)
    with pytest.raises(ValueError):
        draw_segments(img, [(0, 0, 10, 3)])


def test_svg_has_one_line_element_per_segment(tmp_path):
    img = Image.filled(20, 20, 0.0)
    out = tmp_path / "o.svg"
    save_overlay_svg(img, [(1, 1, 8, 8), (2, 9, 15, 9)], out)
    text = out.read_text()
    assert text.count("<line ") == 2
    assert text.startswith("<svg")
