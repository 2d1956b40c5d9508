"""Colored input trees, the tree file format, and static LCA / level-ancestor indexing.

Nodes are numbered ``1..n`` and node 1 is the root.  Every per-node array in
this package has length ``n + 1`` with slot 0 unused, so that ``0`` can stand
for "no node" throughout.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

NONE = 0
WEIGHT_BUDGET = 2 ** 40


class TreeFormatError(ValueError):
    """Raised for malformed tree files or parent arrays that do not form a tree."""


@dataclass(frozen=True)
class ColoredTree:
    """A rooted node-colored tree with optional integer weights.

    ``parent[1] == 0``; colors are normalized to ``1..n_colors``.
    ``color_labels[c]`` is the original label of normalized color ``c``.
    """

    n: int
    parent: np.ndarray
    color: np.ndarray
    weight: np.ndarray | None = None
    color_labels: tuple = field(default=(None,))

    @property
    def n_colors(self) -> int:
        return len(self.color_labels) - 1

    def label(self, c: int):
        return self.color_labels[c]


def normalize_colors(raw) -> tuple[np.ndarray, tuple]:
    """Rank distinct color values; returns (normalized array, labels with slot 0 = None)."""
    distinct = sorted(set(raw))
    rank = {v: k + 1 for k, v in enumerate(distinct)}
    out = np.zeros(len(raw) + 1, dtype=np.int64)
    out[1:] = [rank[v] for v in raw]
    return out, (None, *distinct)


def make_tree(parents, colors, weights=None) -> ColoredTree:
    """Build a validated ColoredTree from parents of nodes ``2..n`` and colors of ``1..n``."""
    n = len(colors)
    if n < 1:
        raise TreeFormatError("tree must have at least one node")
    if len(parents) != n - 1:
        raise TreeFormatError(f"expected {n - 1} parents, got {len(parents)}")
    parent = np.zeros(n + 1, dtype=np.int64)
    for v, p in enumerate(parents, start=2):
        if not 1 <= p <= n:
            raise TreeFormatError(f"parent {p} of node {v} out of range")
        parent[v] = p
    _check_is_tree(parent, n)
    color, labels = normalize_colors(list(colors))
    w = None
    if weights is not None:
        if len(weights) != n:
            raise TreeFormatError(f"expected {n} weights, got {len(weights)}")
        bound = WEIGHT_BUDGET // n
        if any(abs(x) > bound for x in weights):
            raise TreeFormatError(f"weights must satisfy |w| <= 2^40/n = {bound}")
        w = np.zeros(n + 1, dtype=np.int64)
        w[1:] = weights
    return ColoredTree(n=n, parent=parent, color=color, weight=w, color_labels=labels)


def _check_is_tree(parent: np.ndarray, n: int) -> None:
    # every node must reach the root without revisiting a node
    state = np.zeros(n + 1, dtype=np.int8)  # 0 unseen, 1 on stack, 2 reaches root
    state[1] = 2
    for start in range(2, n + 1):
        path = []
        v = start
        while state[v] == 0:
            state[v] = 1
            path.append(v)
            v = int(parent[v])
        if state[v] == 1:
            raise TreeFormatError("not a tree")
        for x in path:
            state[x] = 2


def parse_tree(text: str) -> ColoredTree:
    """Parse the four-line text format (n / parents / colors / optional weights)."""
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if len(lines) < 3:
        raise TreeFormatError("tree file needs at least 3 lines")
    try:
        n = int(lines[0].strip())
        parents = [int(x) for x in lines[1].split()]
        colors = [int(x) for x in lines[2].split()]
        weights = None
        if len(lines) > 3 and lines[3].strip():
            weights = [int(x) for x in lines[3].split()]
    except ValueError as exc:
        raise TreeFormatError(f"malformed line: {exc}") from None
    if len(lines) > 4 and any(s.strip() for s in lines[4:]):
        raise TreeFormatError("unexpected trailing lines")
    if len(colors) != n:
        raise TreeFormatError(f"expected {n} colors, got {len(colors)}")
    return make_tree(parents, colors, weights)


def format_tree(tree: ColoredTree) -> str:
    n = tree.n
    lines = [
        str(n),
        " ".join(str(int(p)) for p in tree.parent[2:]),
        " ".join(str(tree.color_labels[int(c)]) for c in tree.color[1:]),
    ]
    if tree.weight is not None:
        lines.append(" ".join(str(int(x)) for x in tree.weight[1:]))
    return "\n".join(lines) + "\n"


class RootedIndex:
    """Static index over a rooted forest given by a parent array.

    Provides depth, pre-order intervals, subtree sizes, O(1) LCA (sparse table
    over the pre-order) and O(1) level ancestors (jump pointers + ladders).
    ``parent[x] == 0`` marks the root; exactly one root is expected.
    """

    def __init__(self, parent):
        parent = [int(p) for p in parent]
        N = len(parent) - 1
        self.N = N
        self.parent = parent
        children = [[] for _ in range(N + 1)]
        root = 0
        for v in range(1, N + 1):
            p = parent[v]
            if p:
                children[p].append(v)
            elif root:
                raise TreeFormatError("more than one root")
            else:
                root = v
        self.root = root
        self.children = children

        depth = [0] * (N + 1)
        tin = [0] * (N + 1)
        order = []
        stack = [root]
        while stack:
            v = stack.pop()
            tin[v] = len(order)
            order.append(v)
            d = depth[v] + 1
            ch = children[v]
            for c in reversed(ch):
                depth[c] = d
                stack.append(c)
        if len(order) != N:
            raise TreeFormatError("not a tree")
        size = [1] * (N + 1)
        for v in reversed(order):
            p = parent[v]
            if p:
                size[p] += size[v]
        self.depth = depth
        self.tin = tin
        self.size = size
        self.order = order
        self.tout = [tin[v] + size[v] - 1 for v in range(N + 1)]
        self._build_lca()
        self._build_ladders()

    # -- LCA ------------------------------------------------------------
    def _build_lca(self):
        depth = np.asarray(self.depth, dtype=np.int64)
        prev = np.asarray(self.order, dtype=np.int64)
        table = [prev.tolist()]
        span = 1
        while 2 * span <= self.N:
            a, b = prev[:-span], prev[span:]
            prev = np.where(depth[a] <= depth[b], a, b)
            table.append(prev.tolist())
            span *= 2
        self._sparse = table

    def is_ancestor(self, a: int, v: int) -> bool:
        """True when ``a`` is an ancestor of ``v`` (inclusive)."""
        return self.tin[a] <= self.tin[v] <= self.tout[a]

    def lca(self, u: int, v: int) -> int:
        if u == v:
            return u
        tin = self.tin
        a, b = tin[u], tin[v]
        if a > b:
            a, b = b, a
        if self.tout[self.order[a]] >= b:
            return self.order[a]
        # shallowest node in pre-order range (a, b] hangs directly below the LCA
        lo = a + 1
        k = (b - lo + 1).bit_length() - 1
        row = self._sparse[k]
        x, y = row[lo], row[b - (1 << k) + 1]
        x = x if self.depth[x] <= self.depth[y] else y
        return self.parent[x]

    # -- level ancestor ---------------------------------------------------
    def _build_ladders(self):
        N, parent, children, depth = self.N, self.parent, self.children, self.depth
        height = [0] * (N + 1)
        for v in reversed(self.order):
            p = parent[v]
            if p and height[v] + 1 > height[p]:
                height[p] = height[v] + 1
        # long-path decomposition; each path is extended upward by its length
        heavy = [0] * (N + 1)
        for v in range(1, N + 1):
            if children[v]:
                heavy[v] = _heavy_child(children[v], height)
        ladder_of = [0] * (N + 1)
        ladder_pos = [0] * (N + 1)
        ladders = []
        for v in self.order:
            p = parent[v]
            if p and heavy[p] == v:
                continue
            path = []
            x = v
            while True:
                path.append(x)
                if not heavy[x]:
                    break
                x = heavy[x]
            ext = []
            x = parent[v]
            while x and len(ext) < len(path):
                ext.append(x)
                x = parent[x]
            ladder = list(reversed(ext)) + path  # top .. bottom
            lid = len(ladders)
            ladders.append(ladder)
            off = len(ext)
            for pos, y in enumerate(path):
                ladder_of[y] = lid
                ladder_pos[y] = off + pos
        self._ladders = ladders
        self._ladder_of = ladder_of
        self._ladder_pos = ladder_pos
        prev = np.asarray(parent, dtype=np.int64)
        jump = [parent]
        span = 1
        maxd = max(depth) if N else 0
        while 2 * span <= maxd:
            prev = prev[prev]
            jump.append(prev.tolist())
            span *= 2
        self._jump = jump

    def level_ancestor(self, u: int, k: int) -> int:
        """Ancestor of ``u`` exactly ``k`` levels up (``0 <= k <= depth(u)``)."""
        if k < 0 or k > self.depth[u]:
            raise IndexError(f"level {k} out of range for node {u} at depth {self.depth[u]}")
        if k == 0:
            return u
        h = k.bit_length() - 1
        x = self._jump[h][u]
        r = k - (1 << h)
        if r == 0:
            return x
        return self._ladders[self._ladder_of[x]][self._ladder_pos[x] - r]

    def ancestor_at_depth(self, u: int, d: int) -> int:
        return self.level_ancestor(u, self.depth[u] - d)


def _heavy_child(ch, height):
    best = ch[0]
    for c in ch:
        if height[c] > height[best]:
            best = c
    return best


class TreeIndex(RootedIndex):
    """RootedIndex of a ColoredTree (root fixed at node 1)."""

    def __init__(self, tree: ColoredTree):
        super().__init__(tree.parent)
        if self.root != 1:
            raise TreeFormatError("root must be node 1")
        self.tree = tree
        self.n = tree.n

    @property
    def euler_in(self):
        return self.tin

    @property
    def euler_out(self):
        return self.tout


def build_index(tree: ColoredTree) -> TreeIndex:
    return TreeIndex(tree)


def lca(idx: RootedIndex, u: int, v: int) -> int:
    _check_node(idx, u)
    _check_node(idx, v)
    return idx.lca(u, v)


def level_ancestor(idx: RootedIndex, u: int, k: int) -> int:
    _check_node(idx, u)
    return idx.level_ancestor(u, k)


def _check_node(idx: RootedIndex, u: int) -> None:
    if not 1 <= u <= idx.N:
        raise IndexError(f"node {u} out of range 1..{idx.N}")
