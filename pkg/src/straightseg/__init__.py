"""Connected line segment extraction by connectivity-enforcing Hough voting."""

from .config import Params
from .edges import (
    EdgeMaps,
    ThetaStore,
    analyze_edges,
    build_theta_store,
    candidate_match_test,
    directional_derivatives,
    prominent_directions,
    select_directional_map,
    threshold_edges,
)
from .extract import (
    LineSegment,
    extract_all,
    extract_at,
    non_maxima_suppression,
    refine_parameters,
    segments_to_csv,
    segments_to_json,
)
from .image import FormatError, Image, load_image, save_image, save_pgm, save_png
from .lengthmap import (
    LengthMap,
    MapGeometry,
    UpdateRegion,
    equidistant_curve,
    fill_length_maps,
    update_region,
    zoom,
)
from .raster import bresenham, draw_segments, render_overlay
from .synth import (
    Scene,
    ScoreReport,
    TruthSegment,
    add_gaussian_noise,
    gen_crossing_lines,
    gen_segment_grid,
    gen_textured_boundary,
    score,
)

__version__ = "0.1.0"

__all__ = [
    "Params",
    "EdgeMaps",
    "ThetaStore",
    "analyze_edges",
    "build_theta_store",
    "candidate_match_test",
    "directional_derivatives",
    "prominent_directions",
    "select_directional_map",
    "threshold_edges",
    "LineSegment",
    "extract_all",
    "extract_at",
    "non_maxima_suppression",
    "refine_parameters",
    "segments_to_csv",
    "segments_to_json",
    "FormatError",
    "Image",
    "load_image",
    "save_image",
    "save_pgm",
    "save_png",
    "LengthMap",
    "MapGeometry",
    "UpdateRegion",
    "equidistant_curve",
    "fill_length_maps",
    "update_region",
    "zoom",
    "bresenham",
    "draw_segments",
    "render_overlay",
    "Scene",
    "ScoreReport",
    "TruthSegment",
    "add_gaussian_noise",
    "gen_crossing_lines",
    "gen_segment_grid",
    "gen_textured_boundary",
    "score",
]
