"""k shortest and k diverse routes from bidirectional edge-distance trees."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .anglecost import AngleCostFunction, ZeroAngleCost
from .avl import OpCounter
from .graph import (
    InfeasibleError,
    Path,
    RouteGraph,
    build_graph,
    path_report,
    reconstruct_backward,
    reconstruct_forward,
    solve,
)
from .kernels import INF, turn_between
from .raster import ResistanceRaster

__all__ = [
    "PathSet",
    "ShortestPathTrees",
    "build_trees",
    "corridor_penalizing",
    "find_ksp_max",
    "find_ksp_mean",
    "greedy_set",
    "jaccard",
    "k_dispersion",
    "k_shortest",
    "mean_euclidean",
    "yau_hausdorff",
]


@dataclass
class PathSet:
    paths: list[Path]
    truncated: bool = False  # fewer than requested paths were available

    def __len__(self) -> int:
        return len(self.paths)

    def __iter__(self):
        return iter(self.paths)


@dataclass
class ShortestPathTrees:
    """Forward and backward edge-distance maps over one route graph."""

    graph: RouteGraph
    angle_fn: AngleCostFunction
    d_s: np.ndarray
    t_s: np.ndarray
    d_t: np.ndarray
    t_t: np.ndarray

    @property
    def map_elements(self) -> int:
        return self.graph.map_elements(maps=4)

    def s_map(self) -> np.ndarray:
        """S[e] = cheapest source-target route through edge e."""
        both = np.isfinite(self.d_s) & np.isfinite(self.d_t)
        s = np.full_like(self.d_s, INF)
        s[both] = self.d_s[both] + self.d_t[both] - self.graph.cost[both]
        return s

    def optimum(self) -> float:
        s = self.s_map()
        return float(s.min())

    def route_through(self, cid: int, k: int) -> list[tuple[int, int]]:
        """The cheapest full route using edge (cid, k)."""
        head = self.graph.head_of(cid, k)
        prefix = _walk_back(self.graph, self.t_s, cid, k)
        suffix = reconstruct_backward(self.graph, self.d_t, self.t_t,
                                      self.graph.cell_xy(cid), k)
        assert prefix[-1] == self.graph.cell_xy(head)
        return prefix[:-2] + suffix


def _walk_back(graph: RouteGraph, pred: np.ndarray, cid: int, k: int
               ) -> list[tuple[int, int]]:
    """Vertices of the tree walk ending with edge (cid, k)."""
    cells = [graph.head_of(cid, k), cid]
    while True:
        j = int(pred[cid, k])
        if j < 0:
            break
        dx, dy = graph.offsets[j]
        cid = cid - dy * graph.cols - dx
        k = j
        cells.append(cid)
    cells.reverse()
    return [graph.cell_xy(c) for c in cells]


def build_trees(graph: RouteGraph, angle_fn: Optional[AngleCostFunction] = None,
                p: Optional[int] = None,
                counter: Optional[OpCounter] = None) -> ShortestPathTrees:
    angle_fn = angle_fn if angle_fn is not None else ZeroAngleCost()
    d_s, t_s = solve(graph, angle_fn, p=p, counter=counter)
    d_t, t_t = solve(graph, angle_fn, p=p, backward=True, counter=counter)
    trees = ShortestPathTrees(graph, angle_fn, d_s, t_s, d_t, t_t)
    if not math.isfinite(trees.optimum()):
        raise InfeasibleError("target unreachable")
    return trees


# ---------------------------------------------------------------------------
# exact k-shortest enumeration
#
# Sorting S and reconstructing one route per edge recovers only the single
# cheapest route through each edge; a route that crosses over between two
# cheaper routes is missed even though its cost may rank in the top k.  The
# enumerator below is exact: it lazily maintains, per edge, the ranked list
# of walks ending with that edge (each next-best candidate differs from an
# already-ranked walk in the rank of one predecessor), seeded by the forward
# tree.


class _PathEnumerator:
    def __init__(self, graph: RouteGraph, angle_fn: AngleCostFunction,
                 d_s: np.ndarray, t_s: np.ndarray):
        self.graph = graph
        self.fn = angle_fn
        self.d_s = d_s
        self.t_s = t_s
        # ranked[e]: list of (cost, parent_edge or None, parent_rank)
        self.ranked: dict[tuple[int, int], list] = {}
        self.cands: dict[tuple[int, int], list] = {}

    def _turn(self, j: int, k: int) -> float:
        return self.fn(turn_between(self.graph.angles[j],
                                    self.graph.angles[k]))

    def _seed(self, e: tuple[int, int]) -> None:
        cid, k = e
        best = self.d_s[cid, k]
        if not math.isfinite(best):
            self.ranked[e] = []
            self.cands[e] = []
            return
        j = int(self.t_s[cid, k])
        if j < 0:
            parent = None  # one-edge walk leaving the source
            prank = -1
        else:
            dx, dy = self.graph.offsets[j]
            parent = (cid - dy * self.graph.cols - dx, j)
            prank = 0
        self.ranked[e] = [(float(best), parent, prank)]
        # runner-up candidates: best's origin at the next rank, every other
        # origin at rank 0 (the heap key embeds the origin for stable ties;
        # None is encoded as (-1, -1) to stay comparable)
        heap: list = []
        sid = self.graph.cell_id(self.graph.source)
        c_e = float(self.graph.cost[cid, k])
        if parent is not None and cid == sid:
            heap.append((c_e, (-1, -1), -1))
        for tid, jj in self.graph.in_edges_of(cid):
            f = (tid, jj)
            rank = prank + 1 if f == parent else 0
            nxt = self.get(f, rank)
            if nxt is not None:
                heap.append((nxt + self._turn(jj, k) + c_e, f, rank))
        heapq.heapify(heap)
        self.cands[e] = heap

    def get(self, e: tuple[int, int], rank: int) -> Optional[float]:
        """Cost of the rank-th cheapest walk ending with edge e (0-based)."""
        if e not in self.ranked:
            self._seed(e)
        ranked = self.ranked[e]
        heap = self.cands[e]
        while len(ranked) <= rank:
            if not heap:
                return None
            cost, parent, prank = heapq.heappop(heap)
            if parent == (-1, -1):
                ranked.append((cost, None, -1))
                continue
            ranked.append((cost, parent, prank))
            nxt = self.get(parent, prank + 1)
            if nxt is not None:
                cid, k = e
                cand = (nxt + self._turn(parent[1], k)
                        + float(self.graph.cost[cid, k]))
                heapq.heappush(heap, (cand, parent, prank + 1))
        return ranked[rank][0]

    def walk(self, e: tuple[int, int], rank: int) -> list[tuple[int, int]]:
        graph = self.graph
        cells = [graph.head_of(*e)]
        while e is not None:
            cells.append(e[0])
            _, parent, prank = self.ranked[e][rank]
            e, rank = parent, prank
        cells.reverse()
        return [graph.cell_xy(c) for c in cells]


def _enumerate_routes(trees: ShortestPathTrees, limit: Optional[int] = None,
                      cost_cap: float = INF):
    """Yield (cost, vertices) of distinct source-target routes, cheapest
    first, until exhaustion, `limit` routes, or the cost cap."""
    graph = trees.graph
    enum = _PathEnumerator(graph, trees.angle_fn, trees.d_s, trees.t_s)
    tid = graph.cell_id(graph.target)
    heap = []
    for cid, k in graph.in_edges_of(tid):
        c = enum.get((cid, k), 0)
        if c is not None:
            heapq.heappush(heap, (c, (cid, k), 0))
    seen: set[tuple] = set()
    produced = 0
    while heap:
        cost, e, rank = heapq.heappop(heap)
        if cost > cost_cap:
            return
        nxt = enum.get(e, rank + 1)
        if nxt is not None:
            heapq.heappush(heap, (nxt, e, rank + 1))
        vertices = enum.walk(e, rank)
        key = tuple(vertices)
        if key in seen:
            continue
        seen.add(key)
        yield float(cost), vertices
        produced += 1
        if limit is not None and produced >= limit:
            return


def k_shortest(trees: ShortestPathTrees, k: int) -> PathSet:
    """The k cheapest distinct routes, in nondecreasing cost order."""
    if k < 1:
        raise ValueError("k must be positive")
    graph = trees.graph
    paths = []
    for cost, vertices in _enumerate_routes(trees, limit=k):
        rep = path_report(graph.raster, vertices, graph.w_c, trees.angle_fn)
        paths.append(rep)
    return PathSet(paths, truncated=len(paths) < k)


# ---------------------------------------------------------------------------
# diversity metrics (on vertex sets, cell units)


def _as_points(p) -> np.ndarray:
    verts = p.vertices if isinstance(p, Path) else list(p)
    if not verts:
        raise ValueError("empty path")
    return np.asarray(verts, dtype=float)


def _directed(a: np.ndarray, b: np.ndarray, reduce_fn) -> float:
    d = np.sqrt(((a[:, None, :] - b[None, :, :]) ** 2).sum(axis=2))
    return float(reduce_fn(d.min(axis=1)))


def yau_hausdorff(p, q) -> float:
    """Max of the two directed max-min Euclidean distances."""
    a, b = _as_points(p), _as_points(q)
    return max(_directed(a, b, np.max), _directed(b, a, np.max))


def mean_euclidean(p, q) -> float:
    """Max of the two directed mean-min Euclidean distances."""
    a, b = _as_points(p), _as_points(q)
    return max(_directed(a, b, np.mean), _directed(b, a, np.mean))


def jaccard(p, q) -> float:
    """One minus intersection-over-union of the vertex sets."""
    a = set(map(tuple, _as_points(p).astype(int).tolist()))
    b = set(map(tuple, _as_points(q).astype(int).tolist()))
    union = a | b
    if not union:
        raise ValueError("both paths empty")
    return 1.0 - len(a & b) / len(union)


METRICS: dict[str, Callable] = {
    "yau_hausdorff": yau_hausdorff,
    "mean_euclidean": mean_euclidean,
    "jaccard": jaccard,
}


# ---------------------------------------------------------------------------
# diverse selection strategies


def find_ksp_max(trees: ShortestPathTrees, k: int, theta: float) -> PathSet:
    """Greedy diverse routes with a hard tail-distance rule.

    After the optimum, each round keeps only edges whose tail cell is
    strictly farther than theta (Euclidean) from every vertex of every
    selected route, and reconstructs the cheapest route through the
    minimum-S such edge.  Every returned route is then guaranteed to be
    farther than theta in Yau-Hausdorff distance from all earlier ones.
    """
    graph = trees.graph
    s = trees.s_map()
    flat = s.ravel()
    order0 = int(np.argmin(flat))
    cid0, k0 = divmod(order0, graph.K)
    first = trees.route_through(cid0, k0)
    selected = [path_report(graph.raster, first, graph.w_c, trees.angle_fn)]

    ys, xs = np.divmod(np.arange(graph.rows * graph.cols), graph.cols)
    min_dist = np.full(graph.rows * graph.cols, INF)

    def absorb(vertices):
        for x, y in vertices:
            d = np.sqrt((xs - x) ** 2.0 + (ys - y) ** 2.0)
            np.minimum(min_dist, d, out=min_dist)

    absorb(first)
    while len(selected) < k:
        eligible = (min_dist > theta)[:, None] & np.isfinite(s)
        if not eligible.any():
            return PathSet(selected, truncated=True)
        masked = np.where(eligible, s, INF)
        e = int(np.argmin(masked.ravel()))
        cid, kk = divmod(e, graph.K)
        if not math.isfinite(masked[cid, kk]):
            return PathSet(selected, truncated=True)
        vertices = trees.route_through(cid, kk)
        selected.append(path_report(graph.raster, vertices, graph.w_c,
                                    trees.angle_fn))
        absorb(vertices)
    return PathSet(selected, truncated=False)


def _greedy_metric(trees: ShortestPathTrees, k: int, theta: float,
                   metric: Callable, pool_limit: int = 2000) -> PathSet:
    accepted: list[Path] = []
    graph = trees.graph
    for _, vertices in _enumerate_routes(trees, limit=pool_limit):
        if all(metric(vertices, p.vertices) > theta for p in accepted):
            accepted.append(path_report(graph.raster, vertices, graph.w_c,
                                        trees.angle_fn))
            if len(accepted) == k:
                return PathSet(accepted, truncated=False)
    return PathSet(accepted, truncated=True)


def find_ksp_mean(trees: ShortestPathTrees, k: int, theta: float) -> PathSet:
    """Cheapest-first acceptance under the mean-Euclidean distance."""
    return _greedy_metric(trees, k, theta, mean_euclidean)


def greedy_set(trees: ShortestPathTrees, k: int, theta: float) -> PathSet:
    """Cheapest-first acceptance under the Jaccard distance."""
    return _greedy_metric(trees, k, theta, jaccard)


def candidate_pool(trees: ShortestPathTrees, k: int,
                   cost_factor: float = 2.0) -> PathSet:
    """Low-cost route pool for the dispersion picker: the max(50, 10k)
    cheapest distinct routes costing at most cost_factor times the optimum."""
    n = max(50, 10 * k)
    cap = trees.optimum() * cost_factor
    graph = trees.graph
    paths = [path_report(graph.raster, v, graph.w_c, trees.angle_fn)
             for _, v in _enumerate_routes(trees, limit=n, cost_cap=cap)]
    return PathSet(paths, truncated=len(paths) < n)


def k_dispersion(candidates: Sequence[Path], k: int,
                 metric: Callable = yau_hausdorff) -> PathSet:
    """Greedy farthest-point selection; 2-approximates the best achievable
    minimum pairwise distance among all size-k subsets."""
    cands = list(candidates)
    if len(cands) < k:
        raise ValueError("need at least k candidate paths")
    if k < 2 or len(cands) == k:
        return PathSet(cands[:k], truncated=False)
    n = len(cands)
    dmat = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            dmat[i, j] = dmat[j, i] = metric(cands[i], cands[j])
    # seed with the farthest pair (lowest indices on ties)
    best = (-1.0, 0, 1)
    for i in range(n):
        for j in range(i + 1, n):
            if dmat[i, j] > best[0]:
                best = (dmat[i, j], i, j)
    chosen = [best[1], best[2]]
    while len(chosen) < k:
        rest = [i for i in range(n) if i not in chosen]
        nxt = max(rest, key=lambda i: (dmat[i, chosen].min(), -i))
        chosen.append(nxt)
    return PathSet([cands[i] for i in chosen], truncated=False)


def corridor_penalizing(graph: RouteGraph,
                        angle_fn: Optional[AngleCostFunction],
                        k: int, theta: float,
                        penalty: Optional[float] = None,
                        p: Optional[int] = None) -> PathSet:
    """Soft diversity: after each solve, pylon costs within theta of the
    found route are raised by `penalty` and the solve repeats; reported
    costs are always the original, unpenalized ones."""
    angle_fn = angle_fn if angle_fn is not None else ZeroAngleCost()
    base = graph.raster
    if penalty is None:
        free = base.pylon_cost[~base.forbidden_pylon]
        penalty = 2.0 * float(free.mean()) if free.size else 1.0
    raster = base
    paths: list[Path] = []
    ys, xs = np.mgrid[0:base.rows, 0:base.cols]
    for _ in range(k):
        g = build_graph(raster, graph.source, graph.target, graph.d_min,
                        graph.d_max, graph.theta_alpha, graph.w_c)
        dist, pred = solve(g, angle_fn, p=p)
        vertices = reconstruct_forward(g, dist, pred)
        paths.append(path_report(base, vertices, graph.w_c, angle_fn))
        near = np.zeros(base.shape, dtype=bool)
        t2 = theta * theta
        for x, y in vertices:
            near |= (xs - x) ** 2 + (ys - y) ** 2 <= t2
        raster = ResistanceRaster(
            raster.pylon_cost + np.where(near, penalty, 0.0),
            raster.cable_cost.copy(), raster.forbidden_pylon.copy(),
            raster.forbidden_cable.copy(), raster.cell_size_m)
    return PathSet(paths, truncated=False)
