import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from PIL import Image as PILImage

from straightseg import FormatError, Image, load_image, save_pgm, save_png
from straightseg.image import load_pgm, luma


def test_p2_ascii_decode(tmp_path):
    path = tmp_path / "tiny.pgm"
    path.write_text("P2\n3 3\n255\n7 7 7\n7 7 7\n7 7 7\n")
    img = load_image(path)
    assert img.width == 3 and img.height == 3
    assert (img.data == 7.0).all()


def test_p5_binary_decode(tmp_path):
    path = tmp_path / "tiny.pgm"
    path.write_bytes(b"P5\n3 3\n255\n" + bytes(range(9)))
    img = load_image(path)
    assert img.data.flatten().tolist() == list(range(9))


def test_p5_truncated_payload(tmp_path):
    path = tmp_path / "bad.pgm"
    path.write_bytes(b"P5\n3 3\n255\n" + bytes(range(5)))
    with pytest.raises(OSError):
        load_image(path)


def test_p2_comment_and_whitespace(tmp_path):
    path = tmp_path / "c.pgm"
    path.write_text("P2\n# a comment\n2 2\n255\n0 10\n20 30\n")
    img = load_pgm(path)
    assert img.data.tolist() == [[0, 10], [20, 30]]


def test_pgm_16bit_rejected(tmp_path):
    path = tmp_path / "deep.pgm"
    path.write_bytes(b"P5\n2 2\n65535\n" + bytes(8))
    with pytest.raises(FormatError):
        load_pgm(path)


def test_unknown_format(tmp_path):
    path = tmp_path / "not.img"
    path.write_bytes(b"GIF89a....")
    with pytest.raises(FormatError):
        load_image(path)


@settings(max_examples=25, deadline=None)
@given(
    st.integers(3, 12),
    st.integers(3, 12),
    st.integers(0, 2**31 - 1),
    st.booleans(),
)
def test_pgm_roundtrip_bit_exact(tmp_path_factory, width, height, seed, ascii_format):
    rng = np.random.default_rng(seed)
    img = Image(rng.integers(0, 256, size=(height, width)).astype(np.float64))
    path = tmp_path_factory.mktemp("pgm") / "rt.pgm"
    save_pgm(img, path, ascii_format=ascii_format)
    back = load_image(path)
    assert (back.data == img.data).all()


def test_png_gray_roundtrip(tmp_path):
    rng = np.random.default_rng(3)
    img = Image(rng.integers(0, 256, size=(9, 7)).astype(np.float64))
    path = tmp_path / "g.png"
    save_png(img, path)
    assert (load_image(path).data == img.data).all()


def test_png_color_luma(tmp_path):
    rng = np.random.default_rng(4)
    rgb = rng.integers(0, 256, size=(6, 5, 3)).astype(np.uint8)
    path = tmp_path / "c.png"
    PILImage.fromarray(rgb, mode="RGB").save(path)
    img = load_image(path)
    assert (img.data == luma(rgb)).all()


def test_quantize_rounds_and_clamps():
    img = Image(np.array([[-4.2, 0.4], [254.6, 300.0]]))
    assert img.quantized().tolist() == [[0, 0], [255, 255]]
