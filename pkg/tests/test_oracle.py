import random
from fractions import Fraction

import pytest

from pathfreq import oracle
from pathfreq.tree_core import make_tree

from conftest import mixed_tree, naive_parent_walk


def test_path_nodes_t7(t7):
    assert oracle.path_nodes(t7, 4, 6).nodes == [4, 2, 1, 3, 6]
    assert oracle.path_nodes(t7, 5, 4).nodes == [5, 2, 4]
    assert oracle.path_nodes(t7, 3, 3).nodes == [3]
    view = oracle.path_nodes(t7, 4, 6)
    assert view.freq == {2: 2, 1: 3}
    assert view.wsum == {2: 2, 1: 10}
    with pytest.raises(IndexError):
        oracle.path_nodes(t7, 0, 1)


def test_brute_gmax_t7(t7):
    view = oracle.path_nodes(t7, 4, 6)
    assert oracle.brute_gmax(t7, view, "mode") == (1, 3, (1, 6))
    assert oracle.brute_gmax(t7, view, "lfe") == (2, -2, (4, 2))
    assert oracle.brute_gmax(t7, view, "sum") == (1, 10, (1, 6))
    with pytest.raises(ValueError):
        oracle.brute_gmax(t7, view, "median")


def test_sum_needs_weights():
    tree = make_tree([1], [1, 2])
    with pytest.raises(ValueError):
        oracle.brute_gmax(tree, oracle.path_nodes(tree, 1, 2), "sum")


def test_brute_minorities_t7(t7):
    view = oracle.path_nodes(t7, 4, 6)
    assert oracle.brute_minorities(view, Fraction(2, 5)) == {2}
    assert oracle.brute_minorities(view, "1/10") == set()
    assert oracle.brute_minorities(view, 1) == {1, 2}


def test_first_on_path(t7):
    assert oracle.first_on_path(t7, 4, 6, 1) == 1
    assert oracle.first_on_path(t7, 6, 4, 2) == 2
    assert oracle.first_on_path(t7, 4, 6, 3) is None


def test_path_is_simple_and_connected():
    rng = random.Random(0)
    for shape in ("random", "path", "star", "caterpillar", "deep"):
        tree = mixed_tree(rng, 200, shape, 10)
        for _ in range(50):
            i, j = rng.randint(1, 200), rng.randint(1, 200)
            nodes = oracle.path_nodes(tree, i, j).nodes
            assert nodes[0] == i and nodes[-1] == j
            assert len(set(nodes)) == len(nodes)
            for a, b in zip(nodes, nodes[1:]):
                assert int(tree.parent[a]) == b or int(tree.parent[b]) == a
            # the path goes through the LCA found by a naive ancestor walk
            up_i, up_j = naive_parent_walk(tree, i), naive_parent_walk(tree, j)
            lca = next(x for x in up_i if x in set(up_j))
            assert lca in nodes
            assert len(nodes) == up_i.index(lca) + up_j.index(lca) + 1
