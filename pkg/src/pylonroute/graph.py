"""Pylon-spotting graph over a resistance raster.

Vertices are raster cells; there is an edge u -> u+o for every ring offset o
with length in [d_min, d_max] that stays inside the forward cone toward the
target.  Edges are indexed implicitly as (cell, offset index), so all
edge-indexed maps are dense (rows*cols, K) arrays; entries of cells/offsets
that fail the filters hold +inf and never participate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .anglecost import AngleCostFunction, ZeroAngleCost
from .avl import OpCounter
from .kernels import INF, VertexLocalProblem, turn_between, vector_angle
from .anglebf import select_kernel
from .raster import ResistanceRaster

__all__ = [
    "GraphBuildError",
    "InfeasibleError",
    "Path",
    "RouteGraph",
    "bresenham",
    "build_graph",
    "edge_cost",
    "line_routing_baseline",
    "path_report",
    "reconstruct_backward",
    "reconstruct_forward",
    "ring_offsets",
    "solve",
]


class GraphBuildError(ValueError):
    """Raised when the scenario cannot produce a usable graph."""


class InfeasibleError(RuntimeError):
    """Raised when no route exists between source and target."""


def ring_offsets(d_min: float, d_max: float, theta_alpha: float,
                 target_dir: Optional[tuple[float, float]] = None
                 ) -> list[tuple[int, int]]:
    """Integer offsets with norm in [d_min, d_max], restricted to the cone
    of directions deviating strictly less than theta_alpha degrees from
    target_dir.  theta_alpha >= 180 (or no direction) disables the cone.
    """
    if not (0 < d_min <= d_max):
        raise ValueError("need 0 < d_min <= d_max")
    if not (0 < theta_alpha <= 180):
        raise ValueError("theta_alpha must be in (0, 180]")
    r = int(math.floor(d_max))
    use_cone = theta_alpha < 180 and target_dir is not None
    if use_cone:
        tnorm = math.hypot(*target_dir)
        if tnorm == 0:
            raise ValueError("target_dir must be nonzero")
        tx, ty = target_dir[0] / tnorm, target_dir[1] / tnorm
    offsets: list[tuple[int, int]] = []
    for dx in range(-r, r + 1):
        for dy in range(-r, r + 1):
            norm = math.hypot(dx, dy)
            if not (d_min <= norm <= d_max):
                continue
            if use_cone:
                cosv = max(-1.0, min(1.0, (dx * tx + dy * ty) / norm))
                if math.degrees(math.acos(cosv)) >= theta_alpha:
                    continue
            offsets.append((dx, dy))
    if not offsets:
        raise GraphBuildError(
            f"no ring offsets for d_min={d_min}, d_max={d_max}, "
            f"theta_alpha={theta_alpha}")
    offsets.sort()
    return offsets


def bresenham(a: tuple[int, int], b: tuple[int, int]
              ) -> list[tuple[int, int]]:
    """Integer line rasterization from a to b, both endpoints included."""
    if a == b:
        raise ValueError("endpoints must differ")
    x0, y0 = a
    x1, y1 = b
    dx = abs(x1 - x0)
    sx = 1 if x0 < x1 else -1
    dy = -abs(y1 - y0)
    sy = 1 if y0 < y1 else -1
    err = dx + dy
    cells = []
    while True:
        cells.append((x0, y0))
        if x0 == x1 and y0 == y1:
            break
        e2 = 2 * err
        if e2 >= dy:
            err += dy
            x0 += sx
        if e2 <= dx:
            err += dx
            y0 += sy
    return cells


def edge_cost(raster: ResistanceRaster, u: tuple[int, int],
              v: tuple[int, int], w_c: float) -> float:
    """Half the endpoint pylon costs plus w_c times the mean cable cost
    along the rasterized span; +inf when the span crosses forbidden cable."""
    cells = bresenham(u, v)
    if raster.forbidden_pylon[u[1], u[0]] or raster.forbidden_pylon[v[1], v[0]]:
        return INF
    total = 0.0
    for x, y in cells:
        if raster.forbidden_cable[y, x]:
            return INF
        total += raster.cable_cost[y, x]
    pylon = (raster.pylon_cost[u[1], u[0]] + raster.pylon_cost[v[1], v[0]]) / 2
    return pylon + w_c * total / len(cells)


@dataclass
class RouteGraph:
    raster: ResistanceRaster
    source: tuple[int, int]
    target: tuple[int, int]
    offsets: list[tuple[int, int]]
    w_c: float
    d_min: float
    d_max: float
    theta_alpha: float
    cost: np.ndarray        # (rows*cols, K); +inf = edge absent
    angles: np.ndarray      # (K,) direction angle per offset
    n: int                  # usable (non-pylon-forbidden) vertices
    m: int                  # existing edges
    is_dag: bool

    @property
    def rows(self) -> int:
        return self.raster.rows

    @property
    def cols(self) -> int:
        return self.raster.cols

    @property
    def K(self) -> int:
        return len(self.offsets)

    def cell_id(self, xy: tuple[int, int]) -> int:
        return xy[1] * self.cols + xy[0]

    def cell_xy(self, cid: int) -> tuple[int, int]:
        return (cid % self.cols, cid // self.cols)

    def map_elements(self, maps: int = 2) -> int:
        """Edge-map memory accounting: `maps` arrays over the m edges."""
        return maps * self.m

    def head_of(self, cid: int, k: int) -> int:
        dx, dy = self.offsets[k]
        return cid + dy * self.cols + dx

    def in_edges_of(self, cid: int) -> list[tuple[int, int]]:
        """(tail cell id, offset index) pairs of existing edges into cid."""
        x, y = self.cell_xy(cid)
        out = []
        for k, (dx, dy) in enumerate(self.offsets):
            tx, ty = x - dx, y - dy
            if 0 <= tx < self.cols and 0 <= ty < self.rows:
                tid = ty * self.cols + tx
                if self.cost[tid, k] < INF:
                    out.append((tid, k))
        return out


def build_graph(raster: ResistanceRaster, source: tuple[int, int],
                target: tuple[int, int], d_min: float, d_max: float,
                theta_alpha: float, w_c: float) -> RouteGraph:
    rows, cols = raster.shape
    for name, (x, y) in (("source", source), ("target", target)):
        if not raster.in_bounds(x, y):
            raise GraphBuildError(f"{name} outside raster")
        if raster.forbidden_pylon[y, x]:
            raise GraphBuildError(f"{name} forbidden")
    if source == target:
        raise GraphBuildError("source equals target")

    tdir = (target[0] - source[0], target[1] - source[1])
    offsets = ring_offsets(d_min, d_max, theta_alpha, tdir)
    K = len(offsets)
    angles = np.array([vector_angle(dx, dy) for dx, dy in offsets])

    allowed = ~raster.forbidden_pylon
    cp = raster.pylon_cost
    cc = raster.cable_cost
    fc = raster.forbidden_cable
    cost = np.full((rows * cols, K), INF)

    sparse = allowed.mean() < 0.3
    if sparse:
        # gather-based build over allowed tails only; pays off on
        # corridor-restricted rasters where most cells are forbidden
        tails = np.flatnonzero(allowed.ravel())
        txs = tails % cols
        tys = tails // cols
        cpf = cp.ravel()
        ccf = cc.ravel()
        fcf = fc.ravel()
        alf = allowed.ravel()
        for k, (dx, dy) in enumerate(offsets):
            hx = txs + dx
            hy = tys + dy
            inb = (hx >= 0) & (hx < cols) & (hy >= 0) & (hy < rows)
            tid = tails[inb]
            hid = hy[inb] * cols + hx[inb]
            ok = alf[hid]
            tid, hid = tid[ok], hid[ok]
            if tid.size == 0:
                continue
            rel = bresenham((0, 0), (dx, dy))
            csum = np.zeros(tid.size)
            blocked = np.zeros(tid.size, dtype=bool)
            for rx, ry in rel:
                rid = tid + ry * cols + rx
                csum += ccf[rid]
                blocked |= fcf[rid]
            vals = (cpf[tid] + cpf[hid]) / 2 + w_c * csum / len(rel)
            cost[tid[~blocked], k] = vals[~blocked]
    else:
        for k, (dx, dy) in enumerate(offsets):
            # tail window such that tail+offset stays in bounds
            x0, x1 = max(0, -dx), cols - max(0, dx)
            y0, y1 = max(0, -dy), rows - max(0, dy)
            if x0 >= x1 or y0 >= y1:
                continue
            rel = bresenham((0, 0), (dx, dy))
            csum = np.zeros((y1 - y0, x1 - x0))
            blocked = np.zeros((y1 - y0, x1 - x0), dtype=bool)
            for rx, ry in rel:
                csum += cc[y0 + ry:y1 + ry, x0 + rx:x1 + rx]
                blocked |= fc[y0 + ry:y1 + ry, x0 + rx:x1 + rx]
            block = (cp[y0:y1, x0:x1]
                     + cp[y0 + dy:y1 + dy, x0 + dx:x1 + dx]) / 2
            block = block + w_c * csum / len(rel)
            ok = (allowed[y0:y1, x0:x1]
                  & allowed[y0 + dy:y1 + dy, x0 + dx:x1 + dx] & ~blocked)
            full = np.full((rows, cols), INF)
            full[y0:y1, x0:x1] = np.where(ok, block, INF)
            cost[:, k] = full.ravel()

    n = int(allowed.sum())
    m = int(np.isfinite(cost).sum())
    graph = RouteGraph(raster, source, target, offsets, w_c,
                       d_min, d_max, theta_alpha, cost, angles,
                       n, m, is_dag=theta_alpha < 90.0)
    sid = graph.cell_id(source)
    if not np.isfinite(cost[sid]).any():
        raise GraphBuildError("source isolated")
    if not graph.in_edges_of(graph.cell_id(target)):
        raise GraphBuildError("target isolated")
    return graph


# ---------------------------------------------------------------------------
# solvers


def _angle_matrix(graph: RouteGraph, angle_fn: AngleCostFunction
                  ) -> np.ndarray:
    K = graph.K
    A = np.empty((K, K))
    for i in range(K):
        for j in range(K):
            A[i, j] = angle_fn(turn_between(graph.angles[i], graph.angles[j]))
    return A


def _projection_groups(graph: RouteGraph, descending: bool
                       ) -> list[np.ndarray]:
    """Cells grouped by integer projection onto the source->target vector.

    With theta_alpha < 90 every edge strictly increases the projection, so
    ascending groups are a topological order (descending for the backward
    pass)."""
    tdx = graph.target[0] - graph.source[0]
    tdy = graph.target[1] - graph.source[1]
    # only cells with at least one outgoing edge ever need relaxing, which
    # keeps corridor-restricted solves proportional to the corridor size
    cells = np.flatnonzero(np.isfinite(graph.cost).any(axis=1))
    ys, xs = np.divmod(cells, graph.cols)
    proj = xs * tdx + ys * tdy
    # every edge advances the projection by at least minstep, so cells whose
    # projections fall in one minstep-wide bucket cannot be connected and may
    # be relaxed together
    minstep = min(dx * tdx + dy * tdy for dx, dy in graph.offsets)
    if minstep < 1:
        raise ValueError("projection order requires theta_alpha < 90")
    bucket = (proj - proj.min()) // minstep
    perm = np.argsort(bucket, kind="stable")
    if descending:
        perm = perm[::-1]
    order = cells[perm]
    sorted_b = bucket[perm]
    cuts = np.flatnonzero(np.diff(sorted_b)) + 1
    return np.split(order, cuts)


def solve(graph: RouteGraph, angle_fn: Optional[AngleCostFunction] = None,
          p: Optional[int] = None, backward: bool = False,
          counter: Optional[OpCounter] = None
          ) -> tuple[np.ndarray, np.ndarray]:
    """Edge-indexed distances and predecessors over the route graph.

    Forward: D[c, k] = cheapest walk from the source ending with edge
    (c -> c+offset_k); T holds the preceding edge's offset index at c
    (-1 when the walk starts at the source).  Backward: D[c, k] = cheapest
    continuation cost of a path that starts with edge (c, k) and ends at the
    target; T holds the next offset taken at the head (-1 at the target).
    DAG instances run one topological pass; otherwise p double-buffered
    sweeps with early exit on convergence.
    """
    angle_fn = angle_fn if angle_fn is not None else ZeroAngleCost()
    A = _angle_matrix(graph, angle_fn)
    if graph.is_dag:
        return _solve_dag(graph, A, backward, counter)
    if p is None:
        from .anglebf import default_sweep_count
        p = default_sweep_count(graph.source, graph.target, graph.d_min)
    return _solve_sweeps(graph, A, p, backward, counter)


def _init_state(graph: RouteGraph, backward: bool
                ) -> tuple[np.ndarray, np.ndarray]:
    dist = np.full((graph.rows * graph.cols, graph.K), INF)
    pred = np.full((graph.rows * graph.cols, graph.K), -1, dtype=np.int32)
    if backward:
        tid = graph.cell_id(graph.target)
        for cid, k in graph.in_edges_of(tid):
            dist[cid, k] = graph.cost[cid, k]
    else:
        sid = graph.cell_id(graph.source)
        dist[sid] = graph.cost[sid]
    return dist, pred


def _offset_arrays(graph: RouteGraph) -> tuple[np.ndarray, np.ndarray]:
    off = np.asarray(graph.offsets, dtype=np.int64)
    return off[:, 0], off[:, 1]


def _chunks(size: int, k: int):
    # cap the (chunk, K, K) workspace at a few million floats
    step = max(256, 4_000_000 // max(1, k * k))
    for lo in range(0, size, step):
        yield slice(lo, min(size, lo + step))


def _relax_group_forward(graph: RouteGraph, A: np.ndarray, cells: np.ndarray,
                         dist_src: np.ndarray, dist: np.ndarray,
                         pred: np.ndarray, counter: Optional[OpCounter]
                         ) -> bool:
    """Relax all out-edges of `cells` from incoming walk values in dist_src;
    returns True when anything improved."""
    cols, rows, K = graph.cols, graph.rows, graph.K
    dxs, dys = _offset_arrays(graph)
    changed = False
    for sl in _chunks(cells.size, K):
        sub = cells[sl]
        xs = sub % cols
        ys = sub // cols
        tx = xs[:, None] - dxs[None, :]
        ty = ys[:, None] - dys[None, :]
        ok = (tx >= 0) & (tx < cols) & (ty >= 0) & (ty < rows)
        tid = np.where(ok, ty * cols + tx, 0)
        din = np.where(ok, dist_src[tid, np.arange(K)[None, :]], INF)
        if counter is not None:
            counter.comparisons += int(np.isfinite(din).sum()) * K
        cand = din[:, :, None] + A[None, :, :]        # (B, K_in, K_out)
        barg = np.argmin(cand, axis=1).astype(np.int32)
        best = np.take_along_axis(cand, barg[:, None, :].astype(np.int64),
                                  axis=1)[:, 0, :]
        new = best + graph.cost[sub]
        cur = dist[sub]
        improve = new < cur
        if improve.any():
            changed = True
            dist[sub] = np.where(improve, new, cur)
            pred[sub] = np.where(improve, barg, pred[sub])
    return changed


def _relax_group_backward(graph: RouteGraph, A: np.ndarray, cells: np.ndarray,
                          dist_src: np.ndarray, dist: np.ndarray,
                          pred: np.ndarray, counter: Optional[OpCounter]
                          ) -> bool:
    """Relax edges (cells, k) against continuation values at their heads."""
    cols, rows, K = graph.cols, graph.rows, graph.K
    dxs, dys = _offset_arrays(graph)
    changed = False
    for sl in _chunks(cells.size, K):
        sub = cells[sl]
        xs = sub % cols
        ys = sub // cols
        hx = xs[:, None] + dxs[None, :]
        hy = ys[:, None] + dys[None, :]
        ok = (hx >= 0) & (hx < cols) & (hy >= 0) & (hy < rows)
        hid = np.where(ok, hy * cols + hx, 0)
        # dnext[b, k, j]: continuation at the head of (sub[b], k) via offset j
        dnext = np.where(ok[:, :, None], dist_src[hid], INF)
        if counter is not None:
            counter.comparisons += int(np.isfinite(dnext).sum())
        cand = dnext + A[None, :, :]
        barg = np.argmin(cand, axis=2).astype(np.int32)
        best = np.take_along_axis(cand, barg[:, :, None].astype(np.int64),
                                  axis=2)[:, :, 0]
        new = best + graph.cost[sub]
        cur = dist[sub]
        improve = new < cur
        if improve.any():
            changed = True
            dist[sub] = np.where(improve, new, cur)
            pred[sub] = np.where(improve, barg, pred[sub])
    return changed


def _solve_dag(graph: RouteGraph, A: np.ndarray, backward: bool,
               counter: Optional[OpCounter]) -> tuple[np.ndarray, np.ndarray]:
    dist, pred = _init_state(graph, backward)
    groups = _projection_groups(graph, descending=backward)
    relax = _relax_group_backward if backward else _relax_group_forward
    for cells in groups:
        relax(graph, A, cells, dist, dist, pred, counter)
    return dist, pred


def _solve_sweeps(graph: RouteGraph, A: np.ndarray, p: int, backward: bool,
                  counter: Optional[OpCounter]
                  ) -> tuple[np.ndarray, np.ndarray]:
    dist, pred = _init_state(graph, backward)
    all_cells = np.flatnonzero(np.isfinite(graph.cost).any(axis=1))
    relax = _relax_group_backward if backward else _relax_group_forward
    for _ in range(p - 1):
        prev = dist.copy()
        changed = relax(graph, A, all_cells, prev, dist, pred, counter)
        if not changed:
            break
    return dist, pred


# ---------------------------------------------------------------------------
# paths and reports


@dataclass
class Path:
    """A pylon route with its cost decomposition."""

    vertices: list[tuple[int, int]]
    cost: float
    pylon_sum: float = 0.0
    cable_sum: float = 0.0
    angle_sum: float = 0.0
    max_angle: float = 0.0

    @property
    def pylon_count(self) -> int:
        return len(self.vertices)

    def key(self) -> tuple:
        return tuple(self.vertices)


def path_report(raster: ResistanceRaster, vertices: Sequence[tuple[int, int]],
                w_c: float, angle_fn: AngleCostFunction) -> Path:
    """Recompute the full cost decomposition of a vertex sequence."""
    pylon = cable = angle = 0.0
    max_angle = 0.0
    prev_dir: Optional[float] = None
    for u, v in zip(vertices, vertices[1:]):
        cells = bresenham(u, v)
        pylon += (raster.pylon_cost[u[1], u[0]]
                  + raster.pylon_cost[v[1], v[0]]) / 2
        cable += w_c * sum(raster.cable_cost[y, x]
                           for x, y in cells) / len(cells)
        d = vector_angle(v[0] - u[0], v[1] - u[1])
        if prev_dir is not None:
            turn = turn_between(prev_dir, d)
            angle += angle_fn(turn)
            max_angle = max(max_angle, turn)
        prev_dir = d
    return Path(list(vertices), pylon + cable + angle,
                pylon, cable, angle, max_angle)


def reconstruct_forward(graph: RouteGraph, dist: np.ndarray,
                        pred: np.ndarray) -> list[tuple[int, int]]:
    """Cheapest route source->target from a forward solve."""
    tid = graph.cell_id(graph.target)
    in_edges = graph.in_edges_of(tid)
    best = min(in_edges, key=lambda ck: dist[ck[0], ck[1]], default=None)
    if best is None or not math.isfinite(dist[best[0], best[1]]):
        raise InfeasibleError("target unreachable")
    cells = [tid]
    cid, k = best
    while True:
        cells.append(cid)
        j = int(pred[cid, k])
        if j < 0:
            break
        dx, dy = graph.offsets[j]
        cid, k = cid - dy * graph.cols - dx, j
    cells.reverse()
    return [graph.cell_xy(c) for c in cells]


def reconstruct_backward(graph: RouteGraph, dist: np.ndarray,
                         pred: np.ndarray, start: tuple[int, int],
                         first_offset: int) -> list[tuple[int, int]]:
    """Route suffix from `start` taking `first_offset`, down to the target."""
    cid = graph.cell_id(start)
    k = first_offset
    cells = [cid]
    while True:
        j = int(pred[cid, k])
        cid = graph.head_of(cid, k)
        cells.append(cid)
        if j < 0:
            break
        k = j
    return [graph.cell_xy(c) for c in cells]


def solve_route(graph: RouteGraph, angle_fn: Optional[AngleCostFunction],
                p: Optional[int] = None,
                counter: Optional[OpCounter] = None) -> Path:
    """Convenience wrapper: forward solve + reconstruction + report."""
    angle_fn = angle_fn if angle_fn is not None else ZeroAngleCost()
    dist, pred = solve(graph, angle_fn, p=p, counter=counter)
    vertices = reconstruct_forward(graph, dist, pred)
    return path_report(graph.raster, vertices, graph.w_c, angle_fn)


# ---------------------------------------------------------------------------
# kernel-loop solver (explicit kernel selection / op benchmarking)


def solve_dag_kernel(graph: RouteGraph, angle_fn: AngleCostFunction,
                     kernel: str = "auto",
                     counter: Optional[OpCounter] = None
                     ) -> tuple[np.ndarray, np.ndarray]:
    """Topological pass that runs the chosen vertex-update kernel per cell.

    Semantically identical to the vectorized DAG solve; used when a kernel
    is forced on the command line and by the benchmark harness.
    """
    if not graph.is_dag:
        raise ValueError("kernel-loop solver requires a DAG (theta < 90)")
    update = select_kernel(angle_fn, kernel)
    cnt = counter if counter is not None else OpCounter()
    dist, pred = _init_state(graph, backward=False)
    for cells in _projection_groups(graph, descending=False):
        for cid in cells:
            out_ks = np.flatnonzero(np.isfinite(graph.cost[cid])).tolist()
            if not out_ks:
                continue
            in_edges = [(t, k) for t, k in graph.in_edges_of(cid)
                        if math.isfinite(dist[t, k])]
            if not in_edges:
                continue
            problem = VertexLocalProblem(
                in_dists=[float(dist[t, k]) for t, k in in_edges],
                in_angles=[float(graph.angles[k]) for _, k in in_edges],
                out_angles=[float(graph.angles[k]) for k in out_ks],
            )
            local = update(problem, angle_fn, cnt)
            for k, (val, idx) in zip(out_ks, local):
                if idx is None:
                    continue
                cand = val + graph.cost[cid, k]
                if cand < dist[cid, k]:
                    dist[cid, k] = cand
                    pred[cid, k] = in_edges[idx][1]
    return dist, pred


# ---------------------------------------------------------------------------
# line-routing baseline


def line_routing_baseline(raster: ResistanceRaster, source: tuple[int, int],
                          target: tuple[int, int], d_min: float, d_max: float,
                          w_c: float, angle_fn: AngleCostFunction,
                          p: Optional[int] = None) -> Path:
    """Route first, spot pylons second.

    Finds a cell-to-cell route on the 8-neighborhood grid, then re-optimizes
    pylon placement with the scenario's span bounds restricted to cells on
    that route.  The restricted re-optimization keeps the full 360-degree
    neighborhood so the span chain can follow route bends.

    Consecutive route cells sit 1 to 1.41 apart, so a span lower bound above
    that can make the restricted problem infeasible even when the free
    problem is solvable; callers comparing against this baseline should use
    d_min <= 1.
    """
    grid_graph = build_graph(raster, source, target, 1.0, 1.5, 180.0, w_c)
    dist, pred = solve(grid_graph, angle_fn, p=p)
    route = reconstruct_forward(grid_graph, dist, pred)

    on_route = np.ones(raster.shape, dtype=bool)
    for x, y in route:
        on_route[y, x] = False
    restricted = ResistanceRaster(
        raster.pylon_cost.copy(), raster.cable_cost.copy(),
        raster.forbidden_pylon | on_route, raster.forbidden_cable.copy(),
        raster.cell_size_m)
    spot_graph = build_graph(restricted, source, target, d_min, d_max,
                             180.0, w_c)
    sdist, spred = solve(spot_graph, angle_fn, p=p)
    vertices = reconstruct_forward(spot_graph, sdist, spred)
    return path_report(raster, vertices, w_c, angle_fn)
