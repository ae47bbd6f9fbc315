"""Balanced ordered search tree used by the accelerated vertex update kernels.

Keys are anything comparable (floats for angle values, tuples when a
tie-breaking id is needed). Each key holds a bucket of payloads so that
several outgoing edges at the same angle share one node.

An optional :class:`OpCounter` records key comparisons and structural tree
operations, which the benchmark harness uses to compare kernels.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterator, Optional


@dataclass
class OpCounter:
    """Instrumentation shared by the update kernels."""

    comparisons: int = 0
    tree_ops: int = 0

    def add(self, other: "OpCounter") -> None:
        self.comparisons += other.comparisons
        self.tree_ops += other.tree_ops


class _Node:
    __slots__ = ("key", "bucket", "left", "right", "height")

    def __init__(self, key: Any, payload: Any) -> None:
        self.key = key
        self.bucket: list[Any] = [payload]
        self.left: Optional[_Node] = None
        self.right: Optional[_Node] = None
        self.height = 1


def _h(node: Optional[_Node]) -> int:
    return node.height if node is not None else 0


def _update(node: _Node) -> None:
    node.height = 1 + max(_h(node.left), _h(node.right))


def _rotate_right(y: _Node) -> _Node:
    x = y.left
    assert x is not None
    y.left = x.right
    x.right = y
    _update(y)
    _update(x)
    return x


def _rotate_left(x: _Node) -> _Node:
    y = x.right
    assert y is not None
    x.right = y.left
    y.left = x
    _update(x)
    _update(y)
    return y


def _balance(node: _Node) -> _Node:
    _update(node)
    bf = _h(node.left) - _h(node.right)
    if bf > 1:
        assert node.left is not None
        if _h(node.left.left) < _h(node.left.right):
            node.left = _rotate_left(node.left)
        return _rotate_right(node)
    if bf < -1:
        assert node.right is not None
        if _h(node.right.right) < _h(node.right.left):
            node.right = _rotate_right(node.right)
        return _rotate_left(node)
    return node


class AvlTree:
    """AVL tree with bucketed duplicate keys.

    Supports the three queries the kernels need: ``get_inbetween`` (inclusive
    range retrieval), ``find_closest`` (circular bracketing neighbors) and
    ordinary insert/delete.
    """

    def __init__(self, counter: OpCounter | None = None) -> None:
        self._root: Optional[_Node] = None
        self._size = 0
        self.counter = counter if counter is not None else OpCounter()

    def __len__(self) -> int:
        return self._size

    def __bool__(self) -> bool:
        return self._root is not None

    # -- mutation ---------------------------------------------------------

    def insert(self, key: Any, payload: Any = None) -> None:
        self.counter.tree_ops += 1
        self._root = self._insert(self._root, key, payload)
        self._size += 1

    def _insert(self, node: Optional[_Node], key: Any, payload: Any) -> _Node:
        if node is None:
            return _Node(key, payload)
        self.counter.comparisons += 1
        if key == node.key:
            node.bucket.append(payload)
            return node
        if key < node.key:
            node.left = self._insert(node.left, key, payload)
        else:
            node.right = self._insert(node.right, key, payload)
        return _balance(node)

    def delete(self, key: Any) -> list[Any]:
        """Remove the node for *key* entirely, returning its bucket."""
        self.counter.tree_ops += 1
        removed: list[Any] = []
        self._root = self._delete(self._root, key, removed)
        if removed:
            self._size -= 1
        return removed

    def _delete(self, node: Optional[_Node], key: Any, removed: list[Any]) -> Optional[_Node]:
        if node is None:
            return None
        self.counter.comparisons += 1
        if key < node.key:
            node.left = self._delete(node.left, key, removed)
        elif key > node.key:
            node.right = self._delete(node.right, key, removed)
        else:
            removed.extend(node.bucket)
            if node.left is None:
                return node.right
            if node.right is None:
                return node.left
            succ = node.right
            while succ.left is not None:
                succ = succ.left
            node.key = succ.key
            node.bucket = succ.bucket
            # detach the successor node without touching its bucket again
            node.right = self._delete_min(node.right)
        return _balance(node)

    def _delete_min(self, node: _Node) -> Optional[_Node]:
        if node.left is None:
            return node.right
        node.left = self._delete_min(node.left)
        return _balance(node)

    # -- queries ----------------------------------------------------------

    def min_item(self) -> tuple[Any, list[Any]]:
        node = self._root
        if node is None:
            raise ValueError("empty tree")
        while node.left is not None:
            self.counter.tree_ops += 1
            node = node.left
        return node.key, node.bucket

    def max_item(self) -> tuple[Any, list[Any]]:
        node = self._root
        if node is None:
            raise ValueError("empty tree")
        while node.right is not None:
            self.counter.tree_ops += 1
            node = node.right
        return node.key, node.bucket

    def get_inbetween(self, lower: Any, upper: Any) -> list[tuple[Any, list[Any]]]:
        """All (key, bucket) pairs with lower <= key <= upper, sorted."""
        out: list[tuple[Any, list[Any]]] = []
        self._inbetween(self._root, lower, upper, out)
        return out

    def _inbetween(self, node: Optional[_Node], lo: Any, hi: Any,
                   out: list[tuple[Any, list[Any]]]) -> None:
        if node is None:
            return
        self.counter.comparisons += 2
        if lo <= node.key:
            self._inbetween(node.left, lo, hi, out)
        if lo <= node.key <= hi:
            out.append((node.key, node.bucket))
        if node.key <= hi:
            self._inbetween(node.right, lo, hi, out)

    def find_closest(self, x: Any) -> tuple[tuple[Any, list[Any]], tuple[Any, list[Any]]]:
        """Bracketing neighbors of *x* in circular key order.

        Returns ``(left, right)`` where left is the largest key < x and right
        the smallest key >= x; either side wraps around to the opposite end
        of the tree when x falls outside the stored range.
        """
        if self._root is None:
            raise ValueError("empty tree")
        left: Optional[_Node] = None
        right: Optional[_Node] = None
        node: Optional[_Node] = self._root
        while node is not None:
            self.counter.comparisons += 1
            if x > node.key:
                left = node
                node = node.right
            else:
                right = node
                node = node.left
        if left is None:
            k, b = self.max_item()
        else:
            k, b = left.key, left.bucket
        if right is None:
            k2, b2 = self.min_item()
        else:
            k2, b2 = right.key, right.bucket
        return (k, b), (k2, b2)

    def items(self) -> Iterator[tuple[Any, list[Any]]]:
        stack: list[_Node] = []
        node = self._root
        while stack or node is not None:
            while node is not None:
                stack.append(node)
                node = node.left
            node = stack.pop()
            yield node.key, node.bucket
            node = node.right

    def keys(self) -> list[Any]:
        return [k for k, _ in self.items()]
