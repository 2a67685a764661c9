"""Proximity graphs over random planar point sets: exact builders for
disk-empty, lune-empty, cone-nearest and threshold graphs, detectors
and generators for extreme-degree witness configurations, and a Monte
Carlo harness for degree, length and stretch statistics."""

from ._version import VERSION as __version__

from .errors import (
    DisconnectedGraphError,
    DuplicatePointError,
    ParameterError,
    ProxdegError,
    TrialError,
)
from .geom import (
    RECT_UNION,
    ROT_HALF_DIAG,
    ROTATED_SQUARE,
    TWO_PI,
    UNIT_SQUARE,
    ConeSpec,
    Point,
    PointSet,
    Rect,
    Region,
    cone_index,
    contains,
    dist,
    in_gabriel_disk,
    in_lune,
    sqdist,
)
from .graphs import (
    DiGraph,
    Graph,
    gabriel,
    gabriel_naive,
    intersect,
    rng_graph,
    rng_naive,
    unit_disk_graph,
    undirected_view,
    yao,
)
from .witness import (
    PearlSpec,
    StaircaseSpec,
    count_jewels,
    count_maxima,
    count_minima,
    count_staircases,
    find_jewels,
    find_staircases,
    is_staircase,
    is_tiara,
    jewel_scale,
    make_staircase,
    make_tiara,
    pearl_region_index,
    staircase_scale,
)
from .experiment import (
    MEASURES,
    ExperimentConfig,
    GraphKind,
    MeasureStats,
    TrialResult,
    TrialSummary,
    chernoff_tail,
    degree_histogram,
    harmonic,
    max_degree,
    max_edge_length,
    max_out_degree,
    run_trials,
    sample_uniform,
    stretch_details,
    stretch_factor,
    theoretical_k,
    trial_generator,
)

__all__ = [
    "__version__",
    "ProxdegError",
    "ParameterError",
    "DuplicatePointError",
    "DisconnectedGraphError",
    "TrialError",
    "TWO_PI",
    "ROT_HALF_DIAG",
    "UNIT_SQUARE",
    "ROTATED_SQUARE",
    "RECT_UNION",
    "Point",
    "PointSet",
    "Rect",
    "Region",
    "ConeSpec",
    "cone_index",
    "contains",
    "dist",
    "sqdist",
    "in_gabriel_disk",
    "in_lune",
    "Graph",
    "DiGraph",
    "gabriel",
    "gabriel_naive",
    "rng_graph",
    "rng_naive",
    "yao",
    "unit_disk_graph",
    "intersect",
    "undirected_view",
    "PearlSpec",
    "StaircaseSpec",
    "pearl_region_index",
    "is_tiara",
    "make_tiara",
    "is_staircase",
    "make_staircase",
    "jewel_scale",
    "staircase_scale",
    "find_jewels",
    "count_jewels",
    "find_staircases",
    "count_staircases",
    "count_maxima",
    "count_minima",
    "MEASURES",
    "GraphKind",
    "ExperimentConfig",
    "TrialResult",
    "TrialSummary",
    "MeasureStats",
    "trial_generator",
    "sample_uniform",
    "run_trials",
    "max_degree",
    "max_out_degree",
    "max_edge_length",
    "degree_histogram",
    "stretch_factor",
    "stretch_details",
    "theoretical_k",
    "chernoff_tail",
    "harmonic",
]
