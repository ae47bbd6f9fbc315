"""Angle-aware Bellman-Ford over edge-indexed distance maps.

Distances live on edges, not vertices: D[e] is the cheapest walk from the
source that ends by traversing edge e, including every edge cost and every
turning penalty along the way.  T[e] is the preceding edge of that walk
(-1 when the walk is just e itself, leaving the source).
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .anglecost import AngleCostFunction, StepAngleCost, ZeroAngleCost
from .avl import OpCounter
from .kernels import (
    INF,
    VertexLocalProblem,
    convex_update,
    naive_update,
    step_update,
    turn_between,
    vector_angle,
)

__all__ = [
    "EdgeGraph",
    "angle_between",
    "mabf",
    "mabf_dag",
    "reconstruct_path",
    "select_kernel",
]


def angle_between(graph: "EdgeGraph", f: int, e: int) -> float:
    """Unsigned turning angle in [0, 180] when edge e follows edge f."""
    if graph.heads[f] != graph.tails[e]:
        raise ValueError("edges are not incident")
    return turn_between(graph.angles[f], graph.angles[e])


@dataclass
class EdgeGraph:
    """Explicit directed graph with a geometric direction per edge.

    ``angles[e]`` is the travel-direction angle of edge e (degrees, clockwise
    from +x).  Two consecutive edges continue straight exactly when their
    angles are equal.
    """

    n: int
    tails: list[int]
    heads: list[int]
    costs: list[float]
    angles: list[float]

    # adjacency caches, built lazily
    _out: Optional[list[list[int]]] = field(default=None, repr=False)
    _in: Optional[list[list[int]]] = field(default=None, repr=False)

    def __post_init__(self) -> None:
        m = len(self.tails)
        if not (len(self.heads) == len(self.costs) == len(self.angles) == m):
            raise ValueError("edge arrays must align")

    @property
    def m(self) -> int:
        return len(self.tails)

    @classmethod
    def from_points(cls, points: Sequence[tuple[float, float]],
                    edges: Sequence[tuple[int, int, float]]) -> "EdgeGraph":
        """Build from vertex coordinates; edge angles follow the geometry."""
        tails, heads, costs, angles = [], [], [], []
        for u, v, c in edges:
            tails.append(u)
            heads.append(v)
            costs.append(float(c))
            dx = points[v][0] - points[u][0]
            dy = points[v][1] - points[u][1]
            angles.append(vector_angle(dx, dy))
        return cls(len(points), tails, heads, costs, angles)

    def out_edges(self, v: int) -> list[int]:
        if self._out is None:
            out: list[list[int]] = [[] for _ in range(self.n)]
            for e, u in enumerate(self.tails):
                out[u].append(e)
            self._out = out
        return self._out[v]

    def in_edges(self, v: int) -> list[int]:
        if self._in is None:
            inc: list[list[int]] = [[] for _ in range(self.n)]
            for e, w in enumerate(self.heads):
                inc[w].append(e)
            self._in = inc
        return self._in[v]

    def topological_order(self) -> Optional[list[int]]:
        """Vertex order with all edges forward, or None if the graph cycles."""
        indeg = [0] * self.n
        for v in self.heads:
            indeg[v] += 1
        queue = deque(v for v in range(self.n) if indeg[v] == 0)
        order: list[int] = []
        while queue:
            v = queue.popleft()
            order.append(v)
            for e in self.out_edges(v):
                w = self.heads[e]
                indeg[w] -= 1
                if indeg[w] == 0:
                    queue.append(w)
        return order if len(order) == self.n else None


def select_kernel(angle_fn: AngleCostFunction, kernel: str = "auto"):
    """Resolve a kernel name to the update routine appropriate for angle_fn."""
    if kernel == "naive":
        return naive_update
    if kernel == "step":
        if not angle_fn.is_step:
            raise ValueError("step kernel requires a step angle cost")
        return step_update
    if kernel == "convex":
        if not angle_fn.is_convex_increasing:
            raise ValueError("convex kernel requires a convex increasing "
                             "angle cost")
        return convex_update
    if kernel == "auto":
        if isinstance(angle_fn, ZeroAngleCost):
            return naive_update
        if angle_fn.is_step:
            return step_update
        if angle_fn.is_convex_increasing:
            return convex_update
        return naive_update
    raise ValueError(f"unknown kernel {kernel!r}")


def _relax_vertex(graph: EdgeGraph, v: int, d_in: list[float],
                  update, angle_fn: AngleCostFunction,
                  counter: OpCounter) -> Optional[list[tuple[float, int]]]:
    """One local update at v: best incoming walk per outgoing edge.

    Returns (value-before-edge-cost, incoming edge id) per out edge, or None
    when v has no reachable incoming edge.
    """
    in_ids = [e for e in graph.in_edges(v) if d_in[e] < INF]
    out_ids = graph.out_edges(v)
    if not in_ids or not out_ids:
        return None
    problem = VertexLocalProblem(
        in_dists=[d_in[e] for e in in_ids],
        in_angles=[graph.angles[e] for e in in_ids],
        out_angles=[graph.angles[e] for e in out_ids],
    )
    local = update(problem, angle_fn, counter)
    return [(val, in_ids[idx]) if idx is not None else (INF, -1)
            for val, idx in local]


def mabf(graph: EdgeGraph, source: int, p: int,
         angle_fn: Optional[AngleCostFunction] = None,
         kernel: str = "auto",
         counter: Optional[OpCounter] = None
         ) -> tuple[list[float], list[int]]:
    """p-sweep minimal-angle Bellman-Ford.

    After the call D[e] is the cheapest walk of at most p edges from source
    ending with e.  Sweeps are double buffered: every relaxation in sweep j
    reads walk values of at most j edges, so edge counts grow by exactly one
    per sweep and no walk longer than p edges ever contributes.
    """
    if p < 1:
        raise ValueError("p must be at least 1")
    angle_fn = angle_fn if angle_fn is not None else ZeroAngleCost()
    update = select_kernel(angle_fn, kernel)
    cnt = counter if counter is not None else OpCounter()

    m = graph.m
    # walks of exactly one edge: leaving the source
    dist = [INF] * m
    pred = [-1] * m
    for e in graph.out_edges(source):
        dist[e] = graph.costs[e]

    for _ in range(p - 1):
        prev = dist[:]
        for v in range(graph.n):
            relaxed = _relax_vertex(graph, v, prev, update, angle_fn, cnt)
            if relaxed is None:
                continue
            for e, (val, via) in zip(graph.out_edges(v), relaxed):
                cand = val + graph.costs[e]
                if cand < dist[e]:
                    dist[e] = cand
                    pred[e] = via
    return dist, pred


def mabf_dag(graph: EdgeGraph, source: int,
             angle_fn: Optional[AngleCostFunction] = None,
             kernel: str = "auto",
             counter: Optional[OpCounter] = None
             ) -> tuple[list[float], list[int]]:
    """Single topological pass; equals mabf with any sufficiently large p."""
    order = graph.topological_order()
    if order is None:
        raise ValueError("graph has a cycle; use the p-sweep solver")
    angle_fn = angle_fn if angle_fn is not None else ZeroAngleCost()
    update = select_kernel(angle_fn, kernel)
    cnt = counter if counter is not None else OpCounter()

    m = graph.m
    dist = [INF] * m
    pred = [-1] * m
    for e in graph.out_edges(source):
        dist[e] = graph.costs[e]
    for v in order:
        relaxed = _relax_vertex(graph, v, dist, update, angle_fn, cnt)
        if relaxed is None:
            continue
        for e, (val, via) in zip(graph.out_edges(v), relaxed):
            cand = val + graph.costs[e]
            if cand < dist[e]:
                dist[e] = cand
                pred[e] = via
    return dist, pred


def reconstruct_path(graph: EdgeGraph, dist: list[float], pred: list[int],
                     target: int) -> tuple[float, list[int], list[int]]:
    """Cheapest walk into target: (cost, vertex sequence, edge sequence)."""
    best_e = -1
    best = INF
    for e in graph.in_edges(target):
        if dist[e] < best:
            best = dist[e]
            best_e = e
    if best_e < 0:
        raise ValueError("target is unreachable")
    edges: list[int] = []
    e = best_e
    while e != -1:
        edges.append(e)
        e = pred[e]
    edges.reverse()
    vertices = [graph.tails[edges[0]]] + [graph.heads[e] for e in edges]
    return best, vertices, edges


def default_sweep_count(source_xy: tuple[float, float],
                        target_xy: tuple[float, float],
                        d_min: float) -> int:
    """Sweep budget heuristic: twice the straight-line hop count."""
    dx = target_xy[0] - source_xy[0]
    dy = target_xy[1] - source_xy[1]
    return max(1, math.ceil(2.0 * math.hypot(dx, dy) / d_min))
