import math
import random

import pytest

from pylonroute.anglecost import PowerAngleCost, StepAngleCost, ZeroAngleCost
from pylonroute.avl import OpCounter
from pylonroute.kernels import (
    INF,
    VertexLocalProblem,
    convex_update,
    naive_update,
    norm_angle,
    step_update,
    turn_between,
    vector_angle,
)


def random_problem(rng, k, l, inf_frac=0.15):
    dists = [INF if rng.random() < inf_frac else rng.uniform(0, 50)
             for _ in range(k)]
    in_angles = [rng.uniform(0, 360) for _ in range(k)]
    out_angles = [rng.uniform(0, 360) for _ in range(l)]
    return VertexLocalProblem(dists, in_angles, out_angles)


class TestAngleHelpers:
    def test_turn_between_collinear(self):
        assert turn_between(30.0, 30.0) == 0.0

    def test_turn_between_right_angle(self):
        assert turn_between(0.0, 90.0) == 90.0

    def test_turn_between_wraps_shortest_way(self):
        assert turn_between(350.0, 10.0) == pytest.approx(20.0)

    def test_vector_angle_axes(self):
        assert vector_angle(1.0, 0.0) == 0.0
        assert vector_angle(0.0, 1.0) == pytest.approx(90.0)

    def test_norm_angle_range(self):
        assert 0.0 <= norm_angle(-30.0) < 360.0
        assert norm_angle(370.0) == pytest.approx(10.0)


class TestNaive:
    def test_single_incoming_feeds_all(self):
        prob = VertexLocalProblem([3.0], [10.0], [20.0, 200.0])
        out = naive_update(prob, PowerAngleCost(5.0, 2.0))
        assert [r[1] for r in out] == [0, 0]

    def test_zero_angle_cost_picks_global_min(self):
        prob = VertexLocalProblem([5.0, 2.0, 9.0], [0.0, 120.0, 240.0],
                                  [10.0, 170.0, 300.0])
        out = naive_update(prob, ZeroAngleCost())
        assert all(r[0] == 2.0 and r[1] == 1 for r in out)

    def test_all_infinite_incoming(self):
        prob = VertexLocalProblem([INF, INF], [0.0, 90.0], [45.0])
        out = naive_update(prob, ZeroAngleCost())
        assert out[0][0] == INF


class TestStepKernel:
    def test_requires_step_function(self):
        prob = VertexLocalProblem([1.0], [0.0], [10.0])
        with pytest.raises(ValueError):
            step_update(prob, PowerAngleCost(1.0, 2.0))

    def test_single_level_claims_by_global_min(self):
        fn = StepAngleCost((), (2.0,))
        prob = VertexLocalProblem([5.0, 1.0], [0.0, 90.0],
                                  [30.0, 150.0, 270.0])
        got = step_update(prob, fn)
        want = naive_update(prob, fn)
        assert [r[0] for r in got] == [r[0] for r in want]
        assert all(r[1] == 1 for r in got)

    def test_hand_built_two_band(self):
        fn = StepAngleCost((45.0,), (0.0, 10.0))
        # incoming at 0 deg is cheap within its 45-degree band; the outgoing
        # at 90 deg must pay the second level or use the other incoming
        prob = VertexLocalProblem([1.0, 3.0], [0.0, 90.0], [10.0, 90.0])
        got = step_update(prob, fn)
        want = naive_update(prob, fn)
        assert [r[0] for r in got] == [r[0] for r in want]

    def test_matches_naive_exactly_on_random_problems(self):
        rng = random.Random(11)
        for _ in range(80):
            k, l = rng.randint(1, 16), rng.randint(1, 16)
            nbp = rng.randint(0, 3)
            bps = sorted(rng.sample(range(10, 180, 10), nbp))
            levels = [rng.uniform(0, 8) for _ in range(nbp + 1)]
            fn = StepAngleCost(tuple(float(b) for b in bps), tuple(levels))
            prob = random_problem(rng, k, l)
            got = [r[0] for r in step_update(prob, fn)]
            want = [r[0] for r in naive_update(prob, fn)]
            assert got == want


class TestConvexKernel:
    def test_requires_convex_increasing(self):
        prob = VertexLocalProblem([1.0], [0.0], [10.0])
        with pytest.raises(ValueError):
            convex_update(prob, PowerAngleCost(1.0, 0.5))

    def test_single_incoming(self):
        fn = PowerAngleCost(8.0, 2.0)
        prob = VertexLocalProblem([2.0], [45.0], [0.0, 90.0, 300.0])
        got = convex_update(prob, fn)
        want = naive_update(prob, fn)
        for g, w in zip(got, want):
            assert g[0] == pytest.approx(w[0], abs=1e-9)

    def test_symmetric_split(self):
        # equal-cost incomers at 0 and 180: each outgoing angle goes to the
        # nearer incomer
        fn = PowerAngleCost(10.0, 1.0)
        prob = VertexLocalProblem([1.0, 1.0], [0.0, 180.0], [45.0, 135.0])
        got = convex_update(prob, fn)
        assert got[0][1] == 0
        assert got[1][1] == 1

    def test_matches_naive_on_random_problems(self):
        rng = random.Random(23)
        for _ in range(80):
            k, l = rng.randint(1, 16), rng.randint(1, 16)
            fn = PowerAngleCost(rng.uniform(0.5, 20.0),
                                rng.uniform(1.0, 3.0))
            prob = random_problem(rng, k, l)
            got = [r[0] for r in convex_update(prob, fn)]
            want = [r[0] for r in naive_update(prob, fn)]
            for g, w in zip(got, want):
                assert g == pytest.approx(w, abs=1e-9)


def test_operation_counters_scale_sublinearly():
    rng = random.Random(3)
    fn = PowerAngleCost(10.0, 2.0)
    ratios = []
    for size in (64, 256):
        prob = random_problem(rng, size, size, inf_frac=0.0)
        c_naive, c_fast = OpCounter(), OpCounter()
        naive_update(prob, fn, c_naive)
        convex_update(prob, fn, c_fast)
        naive_ops = c_naive.comparisons + c_naive.tree_ops
        fast_ops = c_fast.comparisons + c_fast.tree_ops
        assert fast_ops < naive_ops
        ratios.append(fast_ops / naive_ops)
    assert ratios[1] < ratios[0]
