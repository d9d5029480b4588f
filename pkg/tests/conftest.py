import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from straightseg import Image, Params, draw_segments


@pytest.fixture
def params():
    return Params()


def make_line_image(x1, y1, x2, y2, size=80, background=0.0, value=255.0):
    img = Image.filled(size, size, background)
    return draw_segments(img, [(x1, y1, x2, y2)], value=value)


def small_random_scene(rng_seed: int, size: int):
    """A small scene with a couple of short random segments plus mild noise,
    for exhaustive oracle comparisons."""
    rng = np.random.default_rng(rng_seed)
    img = Image(rng.uniform(0, 30, size=(size, size)))
    n_lines = int(rng.integers(1, 4))
    segs = []
    for _ in range(n_lines):
        x1, y1 = rng.integers(2, size - 2, size=2)
        ang = rng.uniform(0, 180)
        length = rng.integers(8, size)
        x2 = int(np.clip(round(x1 + length * np.cos(np.radians(ang))), 1, size - 2))
        y2 = int(np.clip(round(y1 + length * np.sin(np.radians(ang))), 1, size - 2))
        segs.append((int(x1), int(y1), x2, y2))
    return draw_segments(img, segs, value=230.0)
