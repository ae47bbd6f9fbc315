"""Coarse-to-fine route refinement under an edge budget."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .anglecost import AngleCostFunction, ZeroAngleCost
from .graph import (
    GraphBuildError,
    InfeasibleError,
    Path,
    build_graph,
    path_report,
    reconstruct_forward,
    ring_offsets,
    solve,
)
from .ksp import PathSet, build_trees, k_shortest
from .raster import ResistanceRaster, corridor_mask, downsample

__all__ = [
    "MultiScaleError",
    "MultiScalePlan",
    "ScaleStats",
    "predict_edges",
    "run_multiscale",
]


class MultiScaleError(InfeasibleError):
    """Refinement failed; carries the scale factor that failed."""

    def __init__(self, scale: int, message: str):
        super().__init__(f"scale {scale}: {message}")
        self.scale = scale


@dataclass
class MultiScalePlan:
    scale_factors: list[int]
    edge_budget: int
    corridor_widths: list[float] = field(default_factory=list)

    def __post_init__(self) -> None:
        s = self.scale_factors
        if not s or s[-1] != 1 or any(a <= b for a, b in zip(s, s[1:])):
            raise ValueError("scale factors must strictly decrease to 1")
        if self.edge_budget < 1:
            raise ValueError("edge budget must be positive")


@dataclass
class ScaleStats:
    scale: int
    n: int
    m: int
    corridor_width: Optional[float]


def predict_edges(corridor_cell_count: int, ring_size: int,
                  scale_factor: int = 1) -> int:
    """Edge-count estimate: corridor cells at the next scale times the ring
    size there.  scale_factor converts a cell count measured at full
    resolution down to the next scale."""
    if corridor_cell_count <= 0 or ring_size <= 0 or scale_factor <= 0:
        raise ValueError("inputs must be positive")
    cells = -(-corridor_cell_count // (scale_factor * scale_factor))
    return cells * ring_size


def _scaled_span(value: float, factor: int) -> float:
    return max(1.0, value / factor)


def _block_center(xy: tuple[int, int], factor: int,
                  shape: tuple[int, int]) -> tuple[int, int]:
    x = min(xy[0] * factor + factor // 2, shape[1] - 1)
    y = min(xy[1] * factor + factor // 2, shape[0] - 1)
    return (x, y)


def _pick_width(dist_to_paths: np.ndarray, ring_size: int, d_max: float,
                budget: int) -> float:
    """Largest integer corridor width keeping the edge estimate within the
    budget, never below d_max (the corridor must admit a full span)."""
    lo = int(math.ceil(d_max))
    hi = int(math.ceil(dist_to_paths.max())) + 1
    best = lo
    while lo <= hi:
        mid = (lo + hi) // 2
        cells = int((dist_to_paths <= mid).sum())
        if predict_edges(cells, ring_size) <= budget:
            best = mid
            lo = mid + 1
        else:
            hi = mid - 1
    return float(max(best, int(math.ceil(d_max))))


def run_multiscale(raster: ResistanceRaster, source: tuple[int, int],
                   target: tuple[int, int], d_min: float, d_max: float,
                   theta_alpha: float, w_c: float,
                   angle_fn: Optional[AngleCostFunction],
                   plan: MultiScalePlan, p: Optional[int] = None,
                   k: int = 1) -> tuple[PathSet, MultiScalePlan,
                                        list[ScaleStats]]:
    """Solve coarse, restrict to a corridor around the result, refine.

    With k > 1 every scale keeps the k cheapest routes and the next corridor
    buffers all of them.  Returns the final full-resolution route(s), the
    plan with the chosen corridor widths, and per-scale graph statistics.
    """
    angle_fn = angle_fn if angle_fn is not None else ZeroAngleCost()
    stats: list[ScaleStats] = []
    widths: list[float] = []
    prev_fine_paths: Optional[list[list[tuple[int, int]]]] = None
    paths: PathSet = PathSet([])

    for i, r in enumerate(plan.scale_factors):
        coarse = downsample(raster, r)
        src = (source[0] // r, source[1] // r)
        tgt = (target[0] // r, target[1] // r)
        if src == tgt:
            raise MultiScaleError(r, "source and target collapse together")
        dmin_r = _scaled_span(d_min, r)
        dmax_r = max(dmin_r, _scaled_span(d_max, r))
        if r > 1:
            # keep diagonal moves available when rescaling pinches the ring,
            # otherwise coarse stages lose vertical/horizontal freedom
            dmax_r = max(dmax_r, math.sqrt(2.0))

        width: Optional[float] = None
        working = coarse
        if prev_fine_paths is not None:
            scaled = [[(x // r, y // r) for x, y in path]
                      for path in prev_fine_paths]
            pts = np.array(sorted({v for path in scaled for v in path}),
                           dtype=float)
            ys, xs = np.mgrid[0:coarse.rows, 0:coarse.cols]
            d2 = np.full(coarse.shape, np.inf)
            for px, py in pts:
                np.minimum(d2, (xs - px) ** 2 + (ys - py) ** 2, out=d2)
            dist = np.sqrt(d2)
            tdir = (tgt[0] - src[0], tgt[1] - src[1])
            ring = len(ring_offsets(dmin_r, dmax_r, theta_alpha, tdir))
            width = _pick_width(dist, ring, dmax_r, plan.edge_budget)
            working = corridor_mask(coarse, scaled, width)

        try:
            graph = build_graph(working, src, tgt, dmin_r, dmax_r,
                                theta_alpha, w_c)
        except GraphBuildError as exc:
            raise MultiScaleError(r, str(exc)) from exc
        if graph.m > plan.edge_budget:
            raise MultiScaleError(r, f"{graph.m} edges exceed budget "
                                     f"{plan.edge_budget}")
        stats.append(ScaleStats(r, graph.n, graph.m, width))
        if width is not None:
            widths.append(width)

        try:
            if k > 1:
                trees = build_trees(graph, angle_fn, p=p)
                paths = k_shortest(trees, k)
            else:
                dist_map, pred = solve(graph, angle_fn, p=p)
                vertices = reconstruct_forward(graph, dist_map, pred)
                paths = PathSet([path_report(working, vertices, w_c,
                                             angle_fn)])
        except InfeasibleError as exc:
            raise MultiScaleError(r, str(exc)) from exc

        prev_fine_paths = [
            [_block_center(v, r, raster.shape) for v in path.vertices]
            for path in paths
        ]

    # recompute reports against the original raster at full resolution
    final = PathSet([path_report(raster, path.vertices, w_c, angle_fn)
                     for path in paths], truncated=paths.truncated)
    done = MultiScalePlan(plan.scale_factors, plan.edge_budget, widths)
    return final, done, stats
