"""Grayscale image container and PGM/PNG file handling.

Intensities are kept as real values internally (noise generation produces
non-integers); files are quantized by round-and-clamp to [0, 255] on save.
PGM (P2/P5, maxval <= 255) is the canonical bit-exact format; PNG is read
and written through Pillow for convenience, with color input reduced by
luma = round(0.299 R + 0.587 G + 0.114 B).
"""

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image as _PILImage


class FormatError(ValueError):
    """Unsupported or malformed image file format."""


@dataclass
class Image:
    """A 2-D grayscale intensity grid, row-major, values nominally in [0, 255]."""

    data: np.ndarray

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=np.float64)
        if self.data.ndim != 2:
            raise ValueError(f"image data must be 2-D, got shape {self.data.shape}")

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    def copy(self) -> "Image":
        return Image(self.data.copy())

    def quantized(self) -> np.ndarray:
        """Round-and-clamp to uint8."""
        return np.clip(np.rint(self.data), 0, 255).astype(np.uint8)

    @classmethod
    def filled(cls, width: int, height: int, value: float = 0.0) -> "Image":
        return cls(np.full((height, width), float(value)))


def luma(rgb: np.ndarray) -> np.ndarray:
    """Reduce an (H, W, 3) uint8 array to grayscale by the BT.601 luma formula."""
    r = rgb[:, :, 0].astype(np.float64)
    g = rgb[:, :, 1].astype(np.float64)
    b = rgb[:, :, 2].astype(np.float64)
    return np.rint(0.299 * r + 0.587 * g + 0.114 * b)


def _read_pgm_tokens(raw: bytes, count: int, pos: int) -> tuple[list[int], int]:
    """Read whitespace-separated ASCII integers, skipping # comments."""
    tokens: list[int] = []
    n = len(raw)
    while len(tokens) < count:
        while pos < n and raw[pos : pos + 1].isspace():
            pos += 1
        if pos < n and raw[pos : pos + 1] == b"#":
            while pos < n and raw[pos : pos + 1] != b"\n":
                pos += 1
            continue
        start = pos
        while pos < n and not raw[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise OSError("truncated PGM header")
        try:
            tokens.append(int(raw[start:pos]))
        except ValueError as exc:
            raise FormatError(f"bad PGM header token {raw[start:pos]!r}") from exc
    return tokens, pos


def load_pgm(path) -> Image:
    raw = Path(path).read_bytes()
    magic = raw[:2]
    if magic not in (b"P2", b"P5"):
        raise FormatError(f"not a P2/P5 PGM file: magic {magic!r}")
    (width, height, maxval), pos = _read_pgm_tokens(raw, 3, 2)
    if maxval <= 0 or maxval > 255:
        raise FormatError(f"unsupported PGM maxval {maxval} (only 8-bit supported)")
    if width <= 0 or height <= 0:
        raise FormatError(f"bad PGM dimensions {width}x{height}")
    count = width * height
    if magic == b"P5":
        pos += 1  # single whitespace byte after maxval
        payload = raw[pos : pos + count]
        if len(payload) < count:
            raise OSError(f"truncated P5 payload: expected {count} bytes, got {len(payload)}")
        data = np.frombuffer(payload, dtype=np.uint8).astype(np.float64)
    else:
        values, _ = _read_pgm_tokens(raw, count, pos)
        data = np.array(values, dtype=np.float64)
    if data.max(initial=0) > maxval:
        raise FormatError(f"PGM sample exceeds maxval {maxval}")
    return Image(data.reshape(height, width))


def save_pgm(image: Image, path, ascii_format: bool = False) -> None:
    data = image.quantized()
    header = f"{'P2' if ascii_format else 'P5'}\n{image.width} {image.height}\n255\n"
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        if ascii_format:
            lines = "\n".join(" ".join(str(v) for v in row) for row in data)
            fh.write(lines.encode("ascii"))
            fh.write(b"\n")
        else:
            fh.write(data.tobytes())


def load_png(path) -> Image:
    with _PILImage.open(path) as im:
        if im.mode == "L":
            return Image(np.asarray(im, dtype=np.float64))
        if im.mode == "P":
            im = im.convert("RGB")
        if im.mode in ("RGB", "RGBA"):
            arr = np.asarray(im)[:, :, :3]
            return Image(luma(arr))
        raise FormatError(f"unsupported PNG mode {im.mode!r} (only 8-bit gray/RGB)")


def save_png(image: Image, path) -> None:
    _PILImage.fromarray(image.quantized(), mode="L").save(path, format="PNG")


def load_image(path) -> Image:
    """Load a PGM (P2/P5) or PNG image; color PNG is converted by luma."""
    path = Path(path)
    with open(path, "rb") as fh:
        magic = fh.read(8)
    if magic[:2] in (b"P2", b"P5"):
        return load_pgm(path)
    if magic == b"\x89PNG\r\n\x1a\n":
        return load_png(path)
    raise FormatError(f"unsupported image format in {path.name!r} (need PGM P2/P5 or PNG)")


def save_image(image: Image, path) -> None:
    path = Path(path)
    if path.suffix.lower() == ".png":
        save_png(image, path)
    else:
        save_pgm(image, path)
