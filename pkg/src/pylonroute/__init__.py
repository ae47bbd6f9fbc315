"""Pylon placement and route optimization on resistance rasters."""

from .anglecost import (
    AngleCostFunction,
    PowerAngleCost,
    StepAngleCost,
    ZeroAngleCost,
    sqrt_angle_cost,
)
from .graph import (
    GraphBuildError,
    InfeasibleError,
    Path,
    RouteGraph,
    build_graph,
    line_routing_baseline,
    path_report,
    ring_offsets,
    solve,
    solve_route,
)
from .ksp import (
    PathSet,
    ShortestPathTrees,
    build_trees,
    corridor_penalizing,
    find_ksp_max,
    find_ksp_mean,
    greedy_set,
    jaccard,
    k_dispersion,
    k_shortest,
    mean_euclidean,
    yau_hausdorff,
)
from .multiscale import (
    MultiScaleError,
    MultiScalePlan,
    ScaleStats,
    predict_edges,
    run_multiscale,
)
from .raster import (
    INFINITE,
    Layer,
    LayerWeight,
    ResistanceRaster,
    build_resistance,
    corridor_mask,
    downsample,
    read_ascii_layer,
)
from .scenario import Scenario, ScenarioError, load_scenario, parse_scenario

__version__ = "0.1.0"

__all__ = [
    "AngleCostFunction",
    "GraphBuildError",
    "INFINITE",
    "InfeasibleError",
    "Layer",
    "LayerWeight",
    "MultiScaleError",
    "MultiScalePlan",
    "Path",
    "PathSet",
    "PowerAngleCost",
    "ResistanceRaster",
    "RouteGraph",
    "ScaleStats",
    "Scenario",
    "ScenarioError",
    "ShortestPathTrees",
    "StepAngleCost",
    "ZeroAngleCost",
    "build_graph",
    "build_resistance",
    "build_trees",
    "corridor_mask",
    "corridor_penalizing",
    "downsample",
    "find_ksp_max",
    "find_ksp_mean",
    "greedy_set",
    "jaccard",
    "k_dispersion",
    "k_shortest",
    "line_routing_baseline",
    "load_scenario",
    "mean_euclidean",
    "parse_scenario",
    "path_report",
    "predict_edges",
    "read_ascii_layer",
    "ring_offsets",
    "run_multiscale",
    "solve",
    "solve_route",
    "sqrt_angle_cost",
    "yau_hausdorff",
    "__version__",
]
