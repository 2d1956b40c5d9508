"""Per-color virtual trees.

For a color ``c`` the virtual tree links every c-colored node to its nearest
proper c-colored ancestor, or to a per-color virtual root when there is none.
All virtual trees are stored in one combined forest so a single
:class:`RootedIndex` answers virtual LCA and level-ancestor queries.  In the
combined forest node ``n + c`` is the virtual root of color ``c`` and node
``n + C + 1`` joins all virtual roots.  Outside this module a virtual root is
reported as ``NONE`` (0).
"""

from __future__ import annotations

from bisect import bisect_right

import numpy as np

from .tree_core import NONE, ColoredTree, RootedIndex, TreeIndex


class VirtualForest:
    def __init__(self, tree: ColoredTree, idx: TreeIndex):
        n, C = tree.n, tree.n_colors
        self.tree = tree
        self.idx = idx
        self.n = n
        color = [int(c) for c in tree.color]
        self.color = color

        # one preorder pass with per-color stacks of currently open c-nodes
        vparent = [0] * (n + 1)
        stacks = [[] for _ in range(C + 1)]
        tout = idx.tout
        closing = []  # (tout, color) of open nodes, innermost last
        for v in idx.order:
            t = idx.tin[v]
            while closing and closing[-1][0] < t:
                stacks[closing.pop()[1]].pop()
            c = color[v]
            st = stacks[c]
            vparent[v] = st[-1] if st else NONE
            st.append(v)
            closing.append((tout[v], c))
        self.vparent = vparent

        super_root = n + C + 1
        comb = [0] * (super_root + 1)
        for v in range(1, n + 1):
            comb[v] = vparent[v] or n + color[v]
        for c in range(1, C + 1):
            comb[n + c] = super_root
        self._comb = RootedIndex(comb)
        cdepth = self._comb.depth
        self.vdepth = [cdepth[v] - 1 if v else 0 for v in range(n + 1)]

        occ = [[] for _ in range(C + 1)]
        for v in idx.order:
            occ[color[v]].append(v)
        self.occ_by_euler = occ
        self._occ_tin = [[idx.tin[v] for v in lst] for lst in occ]
        self.count = [len(lst) for lst in occ]

    # -- virtual tree navigation ---------------------------------------
    def _as_external(self, x: int) -> int:
        return x if x <= self.n else NONE

    def vlca(self, u: int, v: int) -> int:
        """LCA of two same-colored nodes in their virtual tree (0 for the virtual root)."""
        if self.color[u] != self.color[v]:
            raise ValueError(f"nodes {u} and {v} have different colors")
        return self._as_external(self._comb.lca(u, v))

    def vlevel_ancestor(self, u: int, k: int) -> int:
        if not 0 <= k <= self.vdepth[u]:
            raise IndexError(f"virtual level {k} out of range for node {u}")
        return self._as_external(self._comb.level_ancestor(u, k))

    # -- colored ancestors ---------------------------------------------
    def lowest_colored_ancestor(self, u: int, c: int) -> int:
        """Deepest c-colored node on the path from ``u`` to the root, ``u`` included."""
        if self.color[u] == c:
            return u
        if not 1 <= c < len(self.occ_by_euler):
            return NONE
        tin = self.idx.tin
        pos = bisect_right(self._occ_tin[c], tin[u]) - 1
        if pos < 0:
            return NONE
        p = self.occ_by_euler[c][pos]
        idx = self.idx
        if idx.is_ancestor(p, u):
            return p
        # the answer is the deepest virtual ancestor of p that is an ancestor of u
        lo, hi = 1, self.vdepth[p]  # candidate offsets k: ancestor = vla(p, k)
        best = NONE
        comb = self._comb
        while lo <= hi:
            mid = (lo + hi) // 2
            x = comb.level_ancestor(p, mid)
            if x <= self.n and idx.is_ancestor(x, u):
                best = x
                hi = mid - 1
            else:
                lo = mid + 1
        return best

    def topmost_below(self, y: int, a: int) -> int:
        """Shallowest virtual ancestor of ``y`` strictly below ``a`` (``a`` may be 0)."""
        return self.vlevel_ancestor(y, self.vdepth[y] - self.vdepth[a] - 1)

    def path_color_endpoints(self, i: int, j: int, c: int):
        """Occurrences of ``c`` on P(i, j) nearest to i and to j, or None when absent."""
        idx = self.idx
        dw = idx.depth[idx.lca(i, j)]
        a = self.lowest_colored_ancestor(i, c)
        b = self.lowest_colored_ancestor(j, c)
        a_on = a != NONE and idx.depth[a] >= dw
        b_on = b != NONE and idx.depth[b] >= dw
        if not a_on and not b_on:
            return None
        left = a if a_on else self.topmost_below(b, a)
        right = b if b_on else self.topmost_below(a, b)
        return left, right

    def path_color_frequency(self, left: int, right: int) -> int:
        """Occurrences of the shared color on P(left, right), both extremal occurrences."""
        x = self.vlca(left, right)
        vd = self.vdepth
        on_path = x != NONE and x == self.idx.lca(left, right)
        return vd[left] + vd[right] - 2 * vd[x] + (1 if on_path else 0)

    def prefix_sums(self, values) -> np.ndarray:
        """Root-prefix accumulation of per-node ``values`` along each virtual tree."""
        out = np.zeros(self.n + 1, dtype=np.int64)
        vp = self.vparent
        for v in self.idx.order:
            out[v] = out[vp[v]] + int(values[v])
        return out


def build_virtual_forest(tree: ColoredTree, idx: TreeIndex) -> VirtualForest:
    return VirtualForest(tree, idx)
