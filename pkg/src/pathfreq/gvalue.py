"""Path g-functions evaluated on contracted endpoints.

A g-function scores a color on a path using only the two extremal
occurrences ``(l, r)`` of that color.  The shipped instances are all
*additive*: every node carries an integer value and the score is the sum of
the values of the color's nodes on ``P(l, r)``.  Additive instances expose
``node_values`` so table precomputation can accumulate scores while walking
the tree; a custom instance may leave it as ``None`` and the engine falls back
to calling :meth:`GFunction.eval_contracted` on tracked endpoints.

Every instance must be symmetric: ``eval_contracted(l, r) == eval_contracted(r, l)``.
"""

from __future__ import annotations

import numpy as np

from .tree_core import NONE, ColoredTree
from .virtual_trees import VirtualForest


class GFunction:
    """Base interface.  Subclasses implement :meth:`eval_contracted`."""

    name = "custom"
    node_values: np.ndarray | None = None

    def __init__(self, vf: VirtualForest):
        self.vf = vf

    def eval_contracted(self, left: int, right: int) -> int:
        raise NotImplementedError

    def _check(self, left: int, right: int) -> None:
        color = self.vf.color
        if color[left] != color[right]:
            raise ValueError(f"endpoints {left} and {right} have different colors")


class AdditiveG(GFunction):
    """Sum of per-node values over the color's occurrences on the path.

    Uses root-prefix sums along the virtual tree: the two prefixes minus twice
    the prefix at the virtual LCA, plus the LCA's own value when it lies on the path.
    """

    def __init__(self, vf: VirtualForest, values: np.ndarray, name: str = "additive"):
        super().__init__(vf)
        self.name = name
        self.node_values = np.asarray(values, dtype=np.int64)
        self._values = self.node_values.tolist()
        self._prefix = vf.prefix_sums(self._values).tolist()

    def eval_contracted(self, left: int, right: int) -> int:
        self._check(left, right)
        vf = self.vf
        x = vf.vlca(left, right)
        pre = self._prefix
        out = pre[left] + pre[right] - 2 * pre[x]
        if x != NONE and x == vf.idx.lca(left, right):
            out += self._values[x]
        return out


def make_mode_g(vf: VirtualForest) -> AdditiveG:
    return AdditiveG(vf, np.ones(vf.n + 1, dtype=np.int64), name="mode")


def make_lfe_g(vf: VirtualForest) -> AdditiveG:
    return AdditiveG(vf, -np.ones(vf.n + 1, dtype=np.int64), name="lfe")


def make_sum_g(vf: VirtualForest, tree: ColoredTree) -> AdditiveG:
    if tree.weight is None:
        raise ValueError("max-sum queries need a tree with weights")
    return AdditiveG(vf, tree.weight, name="sum")
