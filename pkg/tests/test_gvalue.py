import random

import pytest
from hypothesis import given, settings

from pathfreq.gvalue import make_lfe_g, make_mode_g, make_sum_g
from pathfreq.oracle import path_nodes
from pathfreq.tree_core import build_index, make_tree
from pathfreq.virtual_trees import VirtualForest

from conftest import trees


@pytest.fixture
def gs7(t7):
    vf = VirtualForest(t7, build_index(t7))
    return make_mode_g(vf), make_lfe_g(vf), make_sum_g(vf, t7)


def test_t7_examples(gs7):
    mode, lfe, total = gs7
    assert mode.eval_contracted(1, 6) == 3
    assert mode.eval_contracted(4, 2) == 2
    assert lfe.eval_contracted(1, 6) == -3
    assert lfe.eval_contracted(4, 2) == -2
    assert total.eval_contracted(1, 6) == 10
    assert total.eval_contracted(5, 7) == 9
    for u in range(1, 8):
        assert mode.eval_contracted(u, u) == 1
        assert lfe.eval_contracted(u, u) == -1
        assert total.eval_contracted(u, u) == [5, 1, 2, 1, 7, 3, 2][u - 1]


def test_mismatched_endpoint_colors_rejected(gs7):
    with pytest.raises(ValueError):
        gs7[0].eval_contracted(1, 2)


def test_sum_needs_weights():
    t = make_tree([1], [1, 2])
    with pytest.raises(ValueError):
        make_sum_g(VirtualForest(t, build_index(t)), t)


@settings(max_examples=60, deadline=None)
@given(trees(max_n=40, weights=True))
def test_additive_g_equals_naive_accumulation(tree):
    vf = VirtualForest(tree, build_index(tree))
    mode, lfe, total = make_mode_g(vf), make_lfe_g(vf), make_sum_g(vf, tree)
    rng = random.Random(tree.n)
    for _ in range(30):
        i, j = rng.randint(1, tree.n), rng.randint(1, tree.n)
        view = path_nodes(tree, i, j)
        for c, f in view.freq.items():
            ends = vf.path_color_endpoints(i, j, c)
            assert mode.eval_contracted(*ends) == f == -lfe.eval_contracted(*ends)
            assert total.eval_contracted(*ends) == view.wsum[c]
            # symmetric in the endpoints
            assert total.eval_contracted(ends[1], ends[0]) == view.wsum[c]
