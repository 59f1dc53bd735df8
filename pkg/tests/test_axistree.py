import math

import numpy as np
import pytest

from dirsim.axistree import AxisTree


def keys_of(tree: AxisTree) -> list:
    return [node.key for node in tree]


def test_insert_iterates_sorted():
    tree = AxisTree()
    keys = [(5.0, 0, 1), (1.0, 2, 0), (3.0, 1, 2), (1.0, 0, 3), (-2.0, 0, 4)]
    for key in keys:
        tree.insert(key)
    assert keys_of(tree) == sorted(keys)
    tree.check_invariants()


def test_duplicate_insert_rejected():
    tree = AxisTree()
    tree.insert((1.0, 0, 7))
    with pytest.raises(ValueError):
        tree.insert((1.0, 0, 7))


def test_delete_returns_tree_to_sorted_remainder():
    tree = AxisTree()
    nodes = {k: tree.insert((float(k), 0, k)) for k in range(20)}
    for k in (0, 19, 10, 7, 13):
        tree.delete(nodes.pop(k))
        tree.check_invariants()
    assert keys_of(tree) == sorted((float(k), 0, k) for k in nodes)


def test_neighbor_chain_matches_traversal():
    tree = AxisTree()
    rng = np.random.default_rng(17)
    for owner, coord in enumerate(rng.uniform(-100.0, 100.0, size=64)):
        tree.insert((float(coord), int(owner) % 3, int(owner)))
    # Walk the doubly linked chain from the first node.
    forward = []
    node = next(iter(tree))
    assert node.prev.key is None  # head sentinel
    while node.key is not None:
        forward.append(node.key)
        node = node.next
    assert forward == keys_of(tree)
    backward = []
    node = tree.insert((1e9, 0, 999))  # rightmost
    while node.key is not None:
        backward.append(node.key)
        node = node.prev
    assert backward == list(reversed(keys_of(tree)))


def test_randomized_against_sorted_list():
    rng = np.random.default_rng(23)
    tree = AxisTree()
    alive = {}
    next_owner = 0
    for _ in range(2000):
        if alive and rng.random() < 0.4:
            owner = int(rng.choice(list(alive)))
            key, node = alive.pop(owner)
            tree.delete(node)
        else:
            key = (float(rng.integers(-50, 50)), int(rng.integers(0, 3)), next_owner)
            alive[next_owner] = (key, tree.insert(key))
            next_owner += 1
    tree.check_invariants()
    assert keys_of(tree) == sorted(key for key, _ in alive.values())
    assert len(tree) == len(alive)


def test_ascending_insert_stays_balanced():
    tree = AxisTree()
    n = 1024
    for k in range(n):
        tree.insert((float(k), 0, k))
    tree.check_invariants()
    root = next(iter(tree)).parent
    while root.parent is not None:
        root = root.parent
    # AVL height bound: 1.44 log2(n + 2)
    assert root.height <= math.ceil(1.44 * math.log2(n + 2))
