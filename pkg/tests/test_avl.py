import random

import pytest

from pylonroute.avl import AvlTree, OpCounter


def build(values):
    tree = AvlTree()
    for v in values:
        tree.insert(v, v)
    return tree


def keys(pairs):
    return [k for k, _ in pairs]


def test_get_inbetween_basic():
    tree = build([10, 20, 30, 40])
    assert keys(tree.get_inbetween(15, 35)) == [20, 30]


def test_get_inbetween_out_of_range():
    tree = build([10, 20, 30, 40])
    assert tree.get_inbetween(41, 99) == []
    assert tree.get_inbetween(-5, 9) == []


def test_get_inbetween_inclusive_bounds():
    tree = build([10, 20, 30])
    assert keys(tree.get_inbetween(10, 30)) == [10, 20, 30]


def test_find_closest_interior():
    tree = build([10, 20, 30])
    (lk, _), (rk, _) = tree.find_closest(22)
    assert (lk, rk) == (20, 30)


def test_find_closest_wraps_below_minimum():
    # queries left of the smallest key bracket circularly
    tree = build([10, 20, 30])
    (lk, _), (rk, _) = tree.find_closest(5)
    assert (lk, rk) == (30, 10)


def test_find_closest_wraps_above_maximum():
    tree = build([10, 20, 30])
    (lk, _), (rk, _) = tree.find_closest(35)
    assert (lk, rk) == (30, 10)


def test_find_closest_singleton():
    tree = build([42])
    (lk, _), (rk, _) = tree.find_closest(7)
    assert lk == rk == 42


def test_find_closest_empty_raises():
    with pytest.raises(ValueError):
        AvlTree().find_closest(1)


def test_duplicate_keys_bucketed():
    tree = AvlTree()
    tree.insert(5.0, "a")
    tree.insert(5.0, "b")
    [(key, bucket)] = tree.get_inbetween(5.0, 5.0)
    assert key == 5.0 and bucket == ["a", "b"]
    assert tree.delete(5.0) == ["a", "b"]
    assert tree.get_inbetween(5.0, 5.0) == []


def test_insert_delete_random_matches_sorted_set():
    rng = random.Random(0)
    tree = AvlTree()
    ref = set()
    for _ in range(500):
        if ref and rng.random() < 0.4:
            v = rng.choice(sorted(ref))
            ref.discard(v)
            tree.delete(v)
        else:
            v = rng.randint(0, 60)
            if v not in ref:
                ref.add(v)
                tree.insert(v, v)
        lo, hi = sorted((rng.randint(0, 60), rng.randint(0, 60)))
        want = sorted(x for x in ref if lo <= x <= hi)
        assert keys(tree.get_inbetween(lo, hi)) == want


def test_min_max_items():
    tree = build([3, 1, 4, 2, 5])
    assert tree.min_item()[0] == 1
    assert tree.max_item()[0] == 5


def test_op_counter_accumulates():
    counter = OpCounter()
    tree = AvlTree(counter)
    for v in range(20):
        tree.insert(v, v)
    tree.get_inbetween(3, 12)
    assert counter.tree_ops > 0
    assert counter.comparisons > 0
