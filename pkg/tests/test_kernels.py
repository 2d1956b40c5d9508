import random

import numpy as np
import pytest

from pathfreq import _kernels_py, kernels
from pathfreq.subtask_engine import PathQueries, PathStructure

from conftest import mixed_tree

compiled = pytest.mark.skipif(not kernels.COMPILED, reason="compiled extension not built")


def test_backend_name():
    assert kernels.BACKEND in ("cython", "python")
    assert kernels.COMPILED == (kernels.BACKEND == "cython")


def test_pure_fallback_handles_custom_scores():
    ps = PathStructure(mixed_tree(random.Random(1), 20, "random", 4), t1=1)
    sw = kernels.make_sweeper(*ps.skeleton(2), ps.tree.color, None, ps.tree.n_colors,
                              evaluate=lambda a, b: 1)
    assert isinstance(sw, _kernels_py.Sweeper)


@compiled
def test_compiled_rejects_evaluate():
    from pathfreq import _kernels

    ps = PathStructure(mixed_tree(random.Random(1), 20, "random", 4), t1=1)
    with pytest.raises(TypeError):
        _kernels.Sweeper(*ps.skeleton(2), ps.tree.color, np.zeros(21, dtype=np.int64),
                         ps.tree.n_colors, evaluate=lambda a, b: 1)


@compiled
@pytest.mark.parametrize("shape", ["random", "path", "star", "caterpillar", "deep"])
def test_compiled_and_pure_tables_agree(shape):
    tree = mixed_tree(random.Random(7), 600, shape, 40, weights=True)
    fast = PathQueries(tree, t1=1, prefer_compiled=True)
    slow = PathQueries(tree, t1=1, prefer_compiled=False)
    for kind in ("mode", "lfe", "sum"):
        a, b = fast.engine(kind), slow.engine(kind)
        assert type(a.sweepers[3]) is not type(b.sweepers[3])
        for name in ("T1", "T2", "T3", "T5"):
            assert np.array_equal(getattr(a, name), getattr(b, name)), (kind, name)
        assert a.build_ops == b.build_ops
