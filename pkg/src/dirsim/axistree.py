"""Ordered map on an AVL tree with a threaded in-order chain.

Nodes are handed back to the caller on insert and deleted by handle, so
membership updates never search. The doubly linked chain gives O(1)
in-order neighbors, which is what the coordinate sweeps walk. Keys must
be unique and mutually comparable (tuples here).
"""

from __future__ import annotations

from typing import Any, Iterator


class Node:
    __slots__ = ("key", "left", "right", "parent", "height", "prev", "next")

    def __init__(self, key: Any) -> None:
        self.key = key
        self.left: Node | None = None
        self.right: Node | None = None
        self.parent: Node | None = None
        self.height = 1
        self.prev: Node | None = None
        self.next: Node | None = None

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"Node({self.key!r})"


def _h(node: Node | None) -> int:
    return node.height if node is not None else 0


class AxisTree:
    """AVL-backed ordered map with sentinel-bounded in-order threading."""

    def __init__(self) -> None:
        self._root: Node | None = None
        self._size = 0
        # Chain sentinels carry key None and never join the tree.
        self.head = Node(None)
        self.tail = Node(None)
        self.head.next = self.tail
        self.tail.prev = self.head

    def __len__(self) -> int:
        return self._size

    def __iter__(self) -> Iterator[Node]:
        node = self.head.next
        while node is not self.tail:
            yield node
            node = node.next

    # -- structure edits ------------------------------------------------

    def insert(self, key: Any) -> Node:
        """Insert a unique key and return its node handle."""
        node = Node(key)
        if self._root is None:
            self._root = node
            self._link_after(self.head, node)
            self._size += 1
            return node
        cur = self._root
        while True:
            if key < cur.key:
                if cur.left is None:
                    cur.left = node
                    node.parent = cur
                    # A left child is its parent's immediate predecessor.
                    self._link_after(cur.prev, node)
                    break
                cur = cur.left
            elif key > cur.key:
                if cur.right is None:
                    cur.right = node
                    node.parent = cur
                    self._link_after(cur, node)
                    break
                cur = cur.right
            else:
                raise ValueError(f"duplicate key {key!r}")
        self._size += 1
        self._rebalance(cur)
        return node

    def delete(self, node: Node) -> None:
        """Remove a node previously returned by insert."""
        successor = node.next
        node.prev.next = node.next
        node.next.prev = node.prev
        node.prev = node.next = None

        if node.left is None or node.right is None:
            child = node.left if node.left is not None else node.right
            parent = node.parent
            self._replace_child(parent, node, child)
            start = parent
        elif successor.parent is node:
            # Successor is the direct right child; lift it in place.
            parent = node.parent
            successor.left = node.left
            node.left.parent = successor
            self._replace_child(parent, node, successor)
            successor.height = node.height
            start = successor
        else:
            # Successor is the leftmost node of the right subtree; splice
            # it out (it has no left child) and move it into position.
            start = successor.parent
            start.left = successor.right
            if successor.right is not None:
                successor.right.parent = start
            successor.left = node.left
            node.left.parent = successor
            successor.right = node.right
            node.right.parent = successor
            self._replace_child(node.parent, node, successor)
            successor.height = node.height
        node.left = node.right = node.parent = None
        self._size -= 1
        self._rebalance(start)

    # -- internals ------------------------------------------------------

    def _link_after(self, prev: Node, node: Node) -> None:
        node.prev = prev
        node.next = prev.next
        prev.next.prev = node
        prev.next = node

    def _replace_child(self, parent: Node | None, old: Node, new: Node | None) -> None:
        if parent is None:
            self._root = new
        elif parent.left is old:
            parent.left = new
        else:
            parent.right = new
        if new is not None:
            new.parent = parent

    def _rotate_left(self, x: Node) -> Node:
        y = x.right
        parent = x.parent
        x.right = y.left
        if y.left is not None:
            y.left.parent = x
        y.left = x
        x.parent = y
        self._replace_child(parent, x, y)
        x.height = 1 + max(_h(x.left), _h(x.right))
        y.height = 1 + max(_h(y.left), _h(y.right))
        return y

    def _rotate_right(self, x: Node) -> Node:
        y = x.left
        parent = x.parent
        x.left = y.right
        if y.right is not None:
            y.right.parent = x
        y.right = x
        x.parent = y
        self._replace_child(parent, x, y)
        x.height = 1 + max(_h(x.left), _h(x.right))
        y.height = 1 + max(_h(y.left), _h(y.right))
        return y

    def _rebalance(self, node: Node | None) -> None:
        while node is not None:
            height = 1 + max(_h(node.left), _h(node.right))
            balance = _h(node.left) - _h(node.right)
            if balance > 1:
                if _h(node.left.left) < _h(node.left.right):
                    self._rotate_left(node.left)
                node = self._rotate_right(node)
            elif balance < -1:
                if _h(node.right.right) < _h(node.right.left):
                    self._rotate_right(node.right)
                node = self._rotate_left(node)
            elif node.height == height:
                return
            else:
                node.height = height
            node = node.parent

    # -- test support ---------------------------------------------------

    def check_invariants(self) -> None:
        """Assert order, balance, threading, and parentage (tests only)."""
        keys = [n.key for n in self]
        assert keys == sorted(keys), "in-order chain out of order"
        assert len(keys) == self._size

        def walk(node: Node | None, lo: Any, hi: Any) -> int:
            if node is None:
                return 0
            assert (lo is None or node.key > lo) and (hi is None or node.key < hi)
            if node.left is not None:
                assert node.left.parent is node
            if node.right is not None:
                assert node.right.parent is node
            hl = walk(node.left, lo, node.key)
            hr = walk(node.right, node.key, hi)
            assert abs(hl - hr) <= 1, f"unbalanced at {node.key!r}"
            assert node.height == 1 + max(hl, hr)
            return node.height

        total = walk(self._root, None, None)
        assert total == (self._root.height if self._root else 0)
        tree_keys = []

        def inorder(node: Node | None) -> None:
            if node is None:
                return
            inorder(node.left)
            tree_keys.append(node.key)
            inorder(node.right)

        inorder(self._root)
        assert tree_keys == keys, "tree and chain disagree"
