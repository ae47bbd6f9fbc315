import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pylonroute.anglecost import PowerAngleCost, ZeroAngleCost
from pylonroute.graph import (
    GraphBuildError,
    bresenham,
    build_graph,
    edge_cost,
    line_routing_baseline,
    path_report,
    ring_offsets,
    solve,
    solve_route,
)

from conftest import make_raster, uniform_raster


def brute_offsets(d_min, d_max, theta, direction):
    out = []
    r = int(math.ceil(d_max))
    for dx in range(-r, r + 1):
        for dy in range(-r, r + 1):
            norm = math.hypot(dx, dy)
            if not (d_min <= norm <= d_max):
                continue
            if direction is not None and theta < 180.0:
                ux, uy = direction
                dn = math.hypot(ux, uy)
                cosv = (dx * ux + dy * uy) / (norm * dn)
                ang = math.degrees(math.acos(max(-1.0, min(1.0, cosv))))
                if ang >= theta:
                    continue
            out.append((dx, dy))
    return sorted(out)


class TestRingOffsets:
    def test_eight_neighborhood(self):
        got = ring_offsets(1.0, 1.5, 180.0)
        want = sorted([(dx, dy) for dx in (-1, 0, 1) for dy in (-1, 0, 1)
                       if (dx, dy) != (0, 0)])
        assert sorted(got) == want

    def test_ninety_degree_cone_toward_plus_x(self):
        got = ring_offsets(1.0, 1.5, 90.0, (1.0, 0.0))
        assert sorted(got) == [(1, -1), (1, 0), (1, 1)]

    def test_symmetric_ring_matches_brute_force(self):
        got = ring_offsets(3.0, 5.0, 180.0)
        assert sorted(got) == brute_offsets(3.0, 5.0, 180.0, None)

    @given(d_max=st.floats(1.5, 6.0), theta=st.sampled_from([30, 45, 60, 89]),
           dx=st.floats(-1, 1), dy=st.floats(-1, 1))
    @settings(max_examples=60, deadline=None)
    def test_cone_matches_brute_force(self, d_max, theta, dx, dy):
        if math.hypot(dx, dy) < 1e-6:
            return
        got = ring_offsets(1.0, d_max, float(theta), (dx, dy))
        want = brute_offsets(1.0, d_max, float(theta), (dx, dy))
        if not want:
            return  # brute-force empty set would raise in ring_offsets
        assert sorted(got) == want

    def test_empty_ring_rejected(self):
        with pytest.raises(GraphBuildError):
            ring_offsets(0.3, 0.9, 180.0)


class TestBresenham:
    def test_axis_aligned(self):
        assert bresenham((0, 0), (4, 0)) == [(0, 0), (1, 0), (2, 0),
                                             (3, 0), (4, 0)]

    def test_exact_diagonal(self):
        assert bresenham((0, 0), (3, 3)) == [(0, 0), (1, 1), (2, 2), (3, 3)]

    def test_shallow_slope(self):
        assert bresenham((0, 0), (3, 2)) == [(0, 0), (1, 1), (2, 1), (3, 2)]

    def test_degenerate_rejected(self):
        with pytest.raises(ValueError):
            bresenham((2, 2), (2, 2))

    @given(ax=st.integers(0, 9), ay=st.integers(0, 9),
           bx=st.integers(0, 9), by=st.integers(0, 9))
    @settings(max_examples=100, deadline=None)
    def test_endpoints_and_adjacency(self, ax, ay, bx, by):
        if (ax, ay) == (bx, by):
            return
        cells = bresenham((ax, ay), (bx, by))
        assert cells[0] == (ax, ay) and cells[-1] == (bx, by)
        for (x1, y1), (x2, y2) in zip(cells, cells[1:]):
            assert max(abs(x1 - x2), abs(y1 - y2)) == 1
        # reversal hits the same endpoints with the same length
        rev = bresenham((bx, by), (ax, ay))
        assert rev[0] == (bx, by) and rev[-1] == (ax, ay)
        assert len(rev) == len(cells)


class TestEdgeCost:
    def test_uniform_raster(self):
        r = uniform_raster(6, 6, pylon=2.0, cable=4.0)
        assert edge_cost(r, (0, 0), (4, 0), 0.5) == pytest.approx(4.0)

    def test_cable_term_vanishes_at_zero_weight(self):
        r = uniform_raster(6, 6, pylon=2.0, cable=9.0)
        assert edge_cost(r, (0, 0), (3, 2), 0.0) == pytest.approx(2.0)

    def test_hand_computed_five_cell_edge(self):
        cp = np.ones((1, 5))
        cp[0, 0], cp[0, 4] = 1.0, 3.0
        cc = np.array([[2.0, 2.0, 4.0, 4.0, 8.0]])
        r = make_raster(cp, cc)
        assert edge_cost(r, (0, 0), (4, 0), 1.0) == pytest.approx(6.0)

    def test_cable_forbidden_cell_kills_edge(self):
        fc = np.zeros((1, 5), bool)
        fc[0, 2] = True
        r = make_raster(np.ones((1, 5)), forbidden_cable=fc)
        assert edge_cost(r, (0, 0), (4, 0), 1.0) == math.inf

    @given(seed=st.integers(0, 300), bump=st.floats(0.1, 10))
    @settings(max_examples=40, deadline=None)
    def test_monotone_in_cell_costs(self, seed, bump):
        rng = np.random.default_rng(seed)
        cp = rng.uniform(1, 5, (5, 8))
        cc = rng.uniform(0, 5, (5, 8))
        u, v = (0, 0), (7, 4)
        base = edge_cost(make_raster(cp, cc), u, v, 1.0)
        cells = bresenham(u, v)
        cx, cy = cells[len(cells) // 2]
        cc2 = cc.copy()
        cc2[cy, cx] += bump
        assert edge_cost(make_raster(cp, cc2), u, v, 1.0) >= base
        cp2 = cp.copy()
        cp2[v[1], v[0]] += bump
        assert edge_cost(make_raster(cp2, cc), u, v, 1.0) >= base


class TestBuildGraph:
    def test_path_graph_edge_count(self):
        r = uniform_raster(1, 5)
        g = build_graph(r, (0, 0), (4, 0), 1.0, 1.0, 180.0, 1.0)
        assert g.m == 8  # 4 undirected adjacencies, both directions

    def test_three_by_three_eight_neighborhood(self):
        r = uniform_raster(3, 3)
        g = build_graph(r, (0, 0), (2, 2), 1.0, 1.5, 180.0, 1.0)
        assert g.m == 40

    def test_forbidden_cells_excluded(self):
        fp = np.ones((3, 3), bool)
        fp[0, 0] = fp[2, 2] = False
        r = make_raster(np.ones((3, 3)), forbidden_pylon=fp)
        g = build_graph(r, (0, 0), (2, 2), 1.0, 3.0, 180.0, 1.0)
        # the only allowed cells are s and t; all edges run between them
        assert g.n == 2
        assert g.m == 2

    def test_isolated_source_rejected(self):
        fp = np.ones((3, 5), bool)
        fp[1, 0] = fp[1, 4] = False   # s and t too far apart for d_max
        r = make_raster(np.ones((3, 5)), forbidden_pylon=fp)
        with pytest.raises(GraphBuildError):
            build_graph(r, (0, 1), (4, 1), 1.0, 1.5, 180.0, 1.0)

    def test_cone_graph_is_acyclic(self):
        rng = np.random.default_rng(2)
        r = make_raster(rng.uniform(1, 5, (12, 12)))
        g = build_graph(r, (0, 0), (11, 11), 1.0, 2.5, 60.0, 1.0)
        assert g.is_dag
        # every edge strictly advances the projection onto s->t
        tdx, tdy = 11, 11
        for k, (dx, dy) in enumerate(g.offsets):
            assert dx * tdx + dy * tdy > 0

    def test_quartic_edge_growth_with_resolution(self):
        # halving the cell size doubles grid dims and doubles span radii
        coarse = uniform_raster(30, 30)
        fine = uniform_raster(60, 60)
        g1 = build_graph(coarse, (1, 1), (28, 28), 2.0, 4.0, 180.0, 1.0)
        g2 = build_graph(fine, (2, 2), (56, 56), 4.0, 8.0, 180.0, 1.0)
        ratio = g2.m / g1.m
        assert 16 * 0.8 <= ratio <= 16 * 1.2


class TestSolveRoute:
    def test_uniform_raster_straight_route(self):
        r = uniform_raster(3, 13)
        g = build_graph(r, (0, 1), (12, 1), 2.0, 3.0, 45.0, 1.0)
        path = solve_route(g, PowerAngleCost(10.0, 2.0))
        assert path.vertices[0] == (0, 1)
        assert path.vertices[-1] == (12, 1)
        assert all(y == 1 for _, y in path.vertices)
        assert path.angle_sum == 0.0

    def test_report_decomposition_identity(self):
        rng = np.random.default_rng(7)
        for _ in range(10):
            r = make_raster(rng.uniform(1, 9, (8, 10)),
                            rng.uniform(0, 9, (8, 10)))
            g = build_graph(r, (0, 2), (9, 5), 1.0, 2.5, 60.0, 0.7)
            fn = PowerAngleCost(5.0, 2.0)
            path = solve_route(g, fn)
            total = path.pylon_sum + path.cable_sum + path.angle_sum
            assert total == pytest.approx(path.cost, abs=1e-6)

    def test_detour_around_expensive_blob(self):
        cost = np.ones((9, 15))
        cost[3:6, 6:9] = 500.0
        r = make_raster(cost)
        g = build_graph(r, (0, 4), (14, 4), 1.0, 1.5, 180.0, 1.0)
        path = solve_route(g, ZeroAngleCost())
        blob = {(x, y) for x in range(6, 9) for y in range(3, 6)}
        assert not blob.intersection(path.vertices)


class TestLineRoutingBaseline:
    def test_uniform_raster_straight_and_evenly_spaced(self):
        # turning penalty makes the symmetric optimum unique up to spacing
        r = uniform_raster(3, 13)
        path = line_routing_baseline(r, (0, 1), (12, 1), 2.0, 3.0, 1.0,
                                     PowerAngleCost(10.0, 2.0))
        assert all(y == 1 for _, y in path.vertices)
        gaps = {b[0] - a[0] for a, b in zip(path.vertices,
                                            path.vertices[1:])}
        assert len(gaps) <= 2  # even spacing up to the final remainder

    def test_never_beats_direct_optimization(self):
        # d_min=1 keeps the route-restricted re-optimization feasible for
        # any grid route (consecutive route cells are 1..sqrt(2) apart)
        rng = np.random.default_rng(13)
        for _ in range(5):
            r = make_raster(rng.uniform(1, 9, (10, 14)),
                            rng.uniform(0, 9, (10, 14)))
            fn = PowerAngleCost(3.0, 2.0)
            g = build_graph(r, (0, 2), (13, 7), 1.0, 3.0, 180.0, 1.0)
            direct = solve_route(g, fn)
            base = line_routing_baseline(r, (0, 2), (13, 7), 1.0, 3.0,
                                         1.0, fn)
            assert direct.cost <= base.cost + 1e-9
