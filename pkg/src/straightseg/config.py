"""Run configuration with paper-stated defaults, file loading, and overrides."""

import dataclasses
from dataclasses import dataclass
from pathlib import Path


@dataclass
class Params:
    """Extraction parameters. Defaults follow the published values where stated."""

    algorithm: str = "straight"          # straight | hough
    threshold: float = 15.0              # edge threshold T on derivative magnitude
    bins: int = 32                       # orientation histogram bins B
    window_radius: float = 7.0           # circular histogram window radius, pixels
    prominence_fraction: float = 0.5     # fraction of per-direction mass for prominence
    prominence_min_mass: float = 2.0     # least signed evidence for a prominent bin
    max_gap: int = 2                     # d: max center-to-center distance of consecutive matches
    uncertainty_radius: float = 1.0      # R: uncertainty ball radius, pixels
    delta_p: float = 1.0                 # half-width of the position search range
    grid: int = 21                       # G: length map cells per axis
    min_length: int = 10                 # minimum reported segment length, pixels
    guard_deg: float = 2.0               # extra angle margin to catch out-of-range voters
    support_ratio: float = 0.5           # min candidate matches per unit length
    coverage_min: float = 0.8            # min fraction of ring positions with a match
    nms_radius: int = 2                  # peak suppression radius, cells
    zoom: bool = True                    # hierarchical zoom on/off
    zoom_base: int = 8                   # first zoom checkpoint; doubles afterwards
    top_k: int = 20                      # Hough baseline: number of peaks
    hough_theta_res: float = 1.0         # degrees per accumulator column
    hough_rho_res: float = 1.0           # pixels per accumulator row
    noise_sigma: float = 0.0
    rng_seed: int = 0
    threads: int = 1

    @property
    def delta_theta(self) -> float:
        """Half-bin angular tolerance: 90 / B degrees."""
        return 90.0 / self.bins

    def validate(self) -> "Params":
        if self.threshold <= 0:
            raise ValueError("threshold must be > 0")
        if self.bins < 2:
            raise ValueError("bins must be >= 2")
        if self.max_gap < 1:
            raise ValueError("max-gap must be >= 1")
        if self.uncertainty_radius <= 0:
            raise ValueError("uncertainty-radius must be > 0")
        if self.grid < 3:
            raise ValueError("grid must be >= 3")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        if self.algorithm not in ("straight", "hough"):
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        return self

    def replace(self, **overrides) -> "Params":
        clean = {k: v for k, v in overrides.items() if v is not None}
        return dataclasses.replace(self, **clean)


_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(Params)}


def _coerce(name: str, raw: str):
    kind = _FIELD_TYPES[name]
    if kind == "bool":
        return raw.strip().lower() in ("1", "true", "yes", "on")
    if kind == "int":
        return int(raw)
    if kind == "float":
        return float(raw)
    return raw.strip()


def load_params_file(path) -> dict:
    """Parse a key = value config file (one pair per line, # comments)."""
    overrides = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key = value")
        key, raw = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _FIELD_TYPES:
            raise ValueError(f"{path}:{lineno}: unknown parameter {key!r}")
        overrides[key] = _coerce(key, raw.strip().strip('"'))
    return overrides
