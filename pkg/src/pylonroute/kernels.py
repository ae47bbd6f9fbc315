"""Vertex-local distance update kernels.

At a vertex with k incoming and l outgoing edges, the solver must find, for
every outgoing edge, the incoming edge minimizing

    D[in] + angle_cost(turn(in, out))

``naive_update`` does the full k*l scan and doubles as the oracle the two
accelerated kernels are tested against:

* ``step_update`` handles piecewise-constant angle costs by sweeping the
  (incoming, level) tuples in cost order and claiming outgoing angles from a
  balanced tree via range retrieval.
* ``convex_update`` handles convex increasing angle costs by maintaining the
  lower envelope of the shifted per-incoming-edge cost functions as a sorted
  tree of intersection abscissae.

Angles are measured clockwise from the +x axis in [0, 360); the turn between
an incoming angle a and outgoing angle b is min(|a-b|, 360-|a-b|) in [0, 180].
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

from .anglecost import AngleCostFunction, StepAngleCost
from .avl import AvlTree, OpCounter

INF = math.inf


def norm_angle(a: float) -> float:
    """Normalize to [0, 360)."""
    a = a % 360.0
    return a + 360.0 if a < 0 else a


def turn_between(a: float, b: float) -> float:
    """Unsigned turning angle in [0, 180] between two direction angles."""
    d = abs(a - b) % 360.0
    return min(d, 360.0 - d)


def vector_angle(dx: float, dy: float) -> float:
    """Clockwise angle from +x in [0, 360) for a direction vector."""
    return norm_angle(math.degrees(math.atan2(dy, dx)))


@dataclass
class VertexLocalProblem:
    """Incoming distances/angles and outgoing angles at one vertex.

    ``in_angles`` and ``out_angles`` hold the direction angle of the edge
    vector (travel direction), so an incoming and outgoing angle are equal
    exactly when the two edges continue in a straight line.
    """

    in_dists: list[float]
    in_angles: list[float]
    out_angles: list[float]

    def __post_init__(self) -> None:
        if len(self.in_dists) != len(self.in_angles):
            raise ValueError("in_dists and in_angles must align")

    @property
    def k(self) -> int:
        return len(self.in_dists)

    @property
    def l(self) -> int:
        return len(self.out_angles)


UpdateResult = list[tuple[float, Optional[int]]]


def naive_update(problem: VertexLocalProblem, angle_fn: AngleCostFunction,
                 counter: OpCounter | None = None) -> UpdateResult:
    """Exhaustive k*l scan; the reference every other kernel must match."""
    cnt = counter if counter is not None else OpCounter()
    out: UpdateResult = []
    for beta in problem.out_angles:
        best = INF
        best_i: Optional[int] = None
        for i, (dist, alpha) in enumerate(zip(problem.in_dists, problem.in_angles)):
            if dist == INF:
                continue
            cand = dist + angle_fn(turn_between(alpha, beta))
            cnt.comparisons += 1
            if cand < best:
                best = cand
                best_i = i
        out.append((best, best_i))
    return out


# ---------------------------------------------------------------------------
# step-function kernel


def get_inbetween_circular(tree: AvlTree, lower: float, upper: float):
    """Range retrieval on a tree of angle keys, splitting at the 0/360 seam."""
    lower = norm_angle(lower)
    upper = norm_angle(upper)
    if lower <= upper:
        return tree.get_inbetween(lower, upper)
    return tree.get_inbetween(lower, 360.0) + tree.get_inbetween(-1.0, upper)


def step_update(problem: VertexLocalProblem, step_fn: StepAngleCost,
                counter: OpCounter | None = None) -> UpdateResult:
    """Claim outgoing angles per sorted (incoming, level) tuple.

    Tuples are processed in increasing D[in] + level order; each tuple claims
    the still-unclaimed outgoing angles whose turn relative to the incoming
    angle falls in the tuple's angular band. Band retrieval is padded by a
    small epsilon and filtered by the exact turn value, so boundary angles
    are never claimed at the wrong level.
    """
    if not step_fn.is_step:
        raise ValueError("step_update requires a step angle cost function")
    cnt = counter if counter is not None else OpCounter()
    k, l = problem.k, problem.l
    result: UpdateResult = [(INF, None)] * l
    if k == 0 or l == 0:
        return result

    tree = AvlTree(counter=cnt)
    for j, beta in enumerate(problem.out_angles):
        tree.insert(norm_angle(beta), j)

    bounds = (0.0,) + step_fn.breakpoints + (180.0,)
    tuples = [
        (problem.in_dists[i] + step_fn.levels[s], i, s)
        for i in range(k)
        for s in range(step_fn.n_levels)
        if problem.in_dists[i] != INF
    ]
    tuples.sort()
    cnt.comparisons += int(len(tuples) * max(1.0, math.log2(max(2, len(tuples)))))

    eps = 1e-9
    for dist, i, s in tuples:
        if not tree:
            break
        alpha = norm_angle(problem.in_angles[i])
        g_lo, g_hi = bounds[s], bounds[s + 1]
        last = s == step_fn.n_levels - 1
        claimed: list[float] = []
        for lo, hi in ((alpha + g_lo, alpha + g_hi), (alpha - g_hi, alpha - g_lo)):
            for key, bucket in get_inbetween_circular(tree, lo - eps, hi + eps):
                t = turn_between(alpha, key)
                cnt.comparisons += 1
                if g_lo <= t < g_hi or (last and t == 180.0):
                    if key not in claimed:
                        claimed.append(key)
                        for j in bucket:
                            result[j] = (dist, i)
        for key in claimed:
            tree.delete(key)
    return result


# ---------------------------------------------------------------------------
# convex kernel


class _ShiftedCost:
    """f_i(x) = D[in_i] + angle_cost(turn(alpha_i, x)); the per-incoming-edge
    cost curve over outgoing angles."""

    __slots__ = ("dist", "alpha", "_fn", "_counter")

    def __init__(self, dist: float, alpha: float, fn: AngleCostFunction,
                 counter: OpCounter) -> None:
        self.dist = dist
        self.alpha = alpha
        self._fn = fn
        self._counter = counter

    def __call__(self, x: float) -> float:
        self._counter.comparisons += 1
        return self.dist + self._fn(turn_between(self.alpha, x))


def compute_intersection(f_p: Callable[[float], float], f_q: Callable[[float], float],
                         beta_tree: AvlTree, beta_tree_shifted: AvlTree,
                         counter: OpCounter | None = None) -> float:
    """Outgoing angle nearest the crossing where f_p hands over to f_q.

    Descends two trees of outgoing angles (one rotated by 180 degrees so the
    crossing cannot straddle the seam in both), steering left while f_p is
    above f_q, and keeps the candidate with the smallest |f_p - f_q|.
    """
    cnt = counter if counter is not None else OpCounter()
    best_beta = None
    best_gap = INF
    for tree, shifted in ((beta_tree, False), (beta_tree_shifted, True)):
        node = tree._root
        while node is not None:
            cnt.tree_ops += 1
            beta = node.bucket[0] if shifted else node.key
            gap = f_p(beta) - f_q(beta)
            if abs(gap) < best_gap:
                best_gap = abs(gap)
                best_beta = beta
            if gap > 0:
                node = node.left
            else:
                node = node.right
    assert best_beta is not None, "intersection requires at least one outgoing angle"
    return best_beta


def _pair_crossing(f_p: "_ShiftedCost", f_q: "_ShiftedCost",
                   fn: AngleCostFunction) -> Optional[float]:
    """Angle where responsibility passes from f_p (optimal counter-clockwise
    of the result) to f_q (optimal clockwise of it).

    Two shifted convex cost curves either never cross (one dominates; the
    dominated one is never lower anywhere, detectable at the antipode of the
    cheaper function's minimum, returns None) or cross exactly twice. The
    p-to-q handover is bracketed on the half circle starting (or ending) at
    the cheaper minimum, where the sign of f_p - f_q is known at both ends.
    Within the bracket the difference is piecewise smooth between fold points
    of the two turn functions; for linear/quadratic cost families each piece
    is linear in the angle, so secant interpolation is exact, and other
    families fall back to bisection.
    """
    if (f_p.dist, f_p.alpha) <= (f_q.dist, f_q.alpha):
        low, flip = f_p, False
    else:
        low, flip = f_q, True
    opposite = norm_angle(low.alpha + 180.0)
    f_other = f_q if not flip else f_p
    if not f_other(opposite) < low(opposite):
        return None  # the cheaper function dominates everywhere
    if not flip:
        start = low.alpha  # g(start) <= 0, g(start + 180) > 0
        end = start + 180.0
    else:
        start = low.alpha + 180.0  # g < 0 at antipode, >= 0 back at the min
        end = low.alpha + 360.0

    def g(x: float) -> float:
        return f_p(x) - f_q(x)

    # split the bracket at the fold points of either turn function
    points = {start, end}
    for base in (f_p.alpha, f_q.alpha):
        for fold in (base, base + 180.0):
            shifted = start + norm_angle(fold - start)
            if start < shifted < end:
                points.add(shifted)
    xs = sorted(points)
    gs = [g(x) for x in xs]
    exponent = getattr(fn, "exponent", None)
    for x1, x2, g1, g2 in zip(xs, xs[1:], gs, gs[1:]):
        if not g1 <= 0.0 <= g2:
            continue
        if g2 == g1:
            return norm_angle(x1)
        if exponent in (1.0, 2.0):
            # g is linear in x on a fold-free piece for these families
            return norm_angle(x1 - g1 * (x2 - x1) / (g2 - g1))
        lo, hi = x1, x2
        for _ in range(60):
            mid = (lo + hi) / 2.0
            if g(mid) <= 0.0:
                lo = mid
            else:
                hi = mid
        return norm_angle((lo + hi) / 2.0)
    return norm_angle(xs[-1])  # numeric corner: hand over at the bracket end


_Envelope = list  # list[tuple[float, int]]: (arc start angle, owner index)


def _in_piece(x: float, x1: float, span: float) -> bool:
    return 0.0 < (x - x1) % 360.0 < span


def _merge_envelopes(e1: _Envelope, e2: _Envelope, fns: dict,
                     fn: AngleCostFunction, cnt: OpCounter) -> _Envelope:
    """Merge two circular lower envelopes of shifted convex cost curves.

    Each piece between consecutive arc boundaries has one candidate owner per
    envelope; the pair crosses at most twice there. A winner flip across the
    piece pins a single interior crossing; an interior double crossing can
    only straddle the losing curve's minimum (cheaper loser) or the winning
    curve's maximum (costlier loser), so one probe point settles it.
    """

    def pc(p: int, q: int) -> Optional[float]:
        return _pair_crossing(fns[p], fns[q], fn)

    def cheaper(a: int, b: int) -> int:
        fa, fb = fns[a], fns[b]
        cnt.comparisons += 1
        return a if (fa.dist, fa.alpha, a) <= (fb.dist, fb.alpha, b) else b

    if len(e1) == 1 and len(e2) == 1:
        a, b = e1[0][1], e2[0][1]
        x_ab = pc(a, b)
        x_ba = pc(b, a)
        if x_ab is None or x_ba is None:
            return [(0.0, cheaper(a, b))]
        if x_ba <= x_ab:
            return [(x_ba, a), (x_ab, b)]
        return [(x_ab, b), (x_ba, a)]

    bounds = sorted({s for s, _ in e1} | {s for s, _ in e2})
    n = len(bounds)
    s1 = [s for s, _ in e1]
    s2 = [s for s, _ in e2]

    def owner_at(env: _Envelope, starts: list[float], x: float) -> int:
        idx = bisect.bisect_right(starts, x) - 1
        return env[idx][1]

    out: _Envelope = []
    for j in range(n):
        x1 = bounds[j]
        x2 = bounds[j + 1] if j + 1 < n else bounds[0] + 360.0
        a = owner_at(e1, s1, x1)
        b = owner_at(e2, s2, x1)
        if a == b:
            out.append((x1, a))
            continue
        span = x2 - x1
        f_a, f_b = fns[a], fns[b]
        cnt.comparisons += 2
        w1 = a if f_a(x1) <= f_b(x1) else b
        w2 = a if f_a(x2) <= f_b(x2) else b
        if w1 != w2:
            c = pc(w1, w2)
            if c is not None and _in_piece(c, x1, span):
                out.append((x1, w1))
                out.append((c, w2))
            else:  # numeric corner: settle the piece at its midpoint
                cnt.comparisons += 1
                mid = x1 + span / 2.0
                out.append((x1, a if f_a(mid) <= f_b(mid) else b))
            continue
        loser = b if w1 == a else a
        f_l = fns[loser]
        f_w = fns[w1]
        # a cheaper loser can re-emerge strictly inside the piece only around
        # its own minimum angle; a costlier one only around the winner's
        # maximum (the antipode of the winner's angle)
        cnt.comparisons += 1
        if (f_l.dist, f_l.alpha, loser) <= (f_w.dist, f_w.alpha, w1):
            probe = f_l.alpha
        else:
            probe = norm_angle(f_w.alpha + 180.0)
        if _in_piece(probe, x1, span):
            cnt.comparisons += 1
            if f_l(probe) < f_w(probe):
                c1 = pc(w1, loser)
                c2 = pc(loser, w1)
                if c1 is not None and c2 is not None:
                    # either crossing may sit exactly on a piece boundary
                    # when envelopes share kinks (duplicate curves)
                    rel1 = (c1 - x1) % 360.0
                    rel2 = (c2 - x1) % 360.0
                    if rel1 < rel2 and rel1 < span and 0.0 < rel2 <= span:
                        if rel1 > 0.0:
                            out.append((x1, w1))
                        out.append((c1, loser))
                        if rel2 < span:
                            out.append((c2, w1))
                        continue
        out.append((x1, w1))
    # drop repeated owners, including across the wrap
    merged: _Envelope = []
    for s, o in out:
        if merged and merged[-1][1] == o:
            continue
        merged.append((s, o))
    while len(merged) > 1 and merged[0][1] == merged[-1][1]:
        merged.pop(0)
    # crossings found in the wrap piece normalize below earlier starts;
    # rotate so the arc list is sorted again for binary searching
    k0 = min(range(len(merged)), key=lambda idx: merged[idx][0])
    return merged[k0:] + merged[:k0]


def _build_envelope(order: list[int], fns: dict, fn: AngleCostFunction,
                    cnt: OpCounter) -> _Envelope:
    if len(order) == 1:
        return [(0.0, order[0])]
    mid = len(order) // 2
    return _merge_envelopes(_build_envelope(order[:mid], fns, fn, cnt),
                            _build_envelope(order[mid:], fns, fn, cnt),
                            fns, fn, cnt)


def convex_update(problem: VertexLocalProblem, convex_fn: AngleCostFunction,
                  counter: OpCounter | None = None) -> UpdateResult:
    """Lower-envelope kernel for convex increasing angle cost functions.

    Builds the circular lower envelope of the shifted cost curves by
    divide-and-conquer merging, then answers each outgoing edge with one
    binary search plus one evaluation.
    """
    if not convex_fn.is_convex_increasing:
        raise ValueError("convex_update requires a convex increasing angle cost")
    cnt = counter if counter is not None else OpCounter()
    k, l = problem.k, problem.l
    result: UpdateResult = [(INF, None)] * l
    if l == 0:
        return result
    order = sorted(
        (i for i in range(k) if problem.in_dists[i] != INF),
        key=lambda i: (problem.in_dists[i], i),
    )
    if not order:
        return result

    fns = {
        i: _ShiftedCost(problem.in_dists[i], norm_angle(problem.in_angles[i]),
                        convex_fn, cnt)
        for i in order
    }
    env = _build_envelope(order, fns, convex_fn, cnt)
    starts = [s for s, _ in env]
    depth = max(1, len(env).bit_length())
    for j, beta_raw in enumerate(problem.out_angles):
        beta = norm_angle(beta_raw)
        cnt.tree_ops += depth  # binary search over the envelope arcs
        idx = bisect.bisect_right(starts, beta) - 1
        owner = env[idx][1]
        result[j] = (fns[owner](beta), owner)
    return result
