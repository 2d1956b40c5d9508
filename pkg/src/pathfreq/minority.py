"""Path alpha-minority queries.

A color is an alpha-minority of ``P(i, j)`` when it occurs on the path at most
``alpha * |P(i, j)|`` times.  Candidates come from the few distinct colors
nearest each endpoint; a Monte Carlo query returns a random surviving candidate
(correct with probability at least 1/2 when a minority exists) and a Las Vegas
query keeps sampling and verifying until it finds one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .tree_core import NONE, ColoredTree, TreeIndex, build_index
from .virtual_trees import VirtualForest


class DistinctAncestorIndex:
    """Nearest distinct colors on root paths.

    Each node owns a version of a persistent segment tree over depths in which
    depth ``d`` is set when the ancestor at depth ``d`` is the deepest
    occurrence of its color on the node's root path.  The k nearest distinct
    colors are then the k deepest set positions.
    """

    def __init__(self, tree: ColoredTree, idx: TreeIndex, vf: VirtualForest):
        self.idx = idx
        self.color = vf.color
        depth = idx.depth
        size = 1
        while size < max(depth) + 1:
            size *= 2
        self.size = size
        # node 0 is the shared empty subtree
        self.left = [0]
        self.right = [0]
        self.cnt = [0]
        self.version = [0] * (tree.n + 1)
        vparent = vf.vparent
        parent = idx.parent
        for v in idx.order:
            ver = self.version[parent[v]] if v != idx.root else 0
            above = vparent[v]
            if above != NONE:
                ver = self._update(ver, depth[above], -1)
            self.version[v] = self._update(ver, depth[v], 1)

    def _update(self, root: int, pos: int, delta: int) -> int:
        left, right, cnt = self.left, self.right, self.cnt
        path = []
        node, lo, hi = root, 0, self.size
        while hi - lo > 1:
            mid = (lo + hi) // 2
            path.append((node, pos < mid))
            if pos < mid:
                node, hi = left[node], mid
            else:
                node, lo = right[node], mid
        cnt.append(cnt[node] + delta)
        left.append(0)
        right.append(0)
        child = len(cnt) - 1
        for node, went_left in reversed(path):
            if went_left:
                left.append(child)
                right.append(right[node])
            else:
                left.append(left[node])
                right.append(child)
            cnt.append(cnt[node] + delta)
            child = len(cnt) - 1
        return child

    def nearest(self, u: int, k: int, min_depth: int = 0) -> list:
        """Up to k ``(node, color)`` pairs nearest to ``u`` on its root path, ancestors at depth >= ``min_depth``."""
        if k < 1:
            raise ValueError("k must be at least 1")
        left, right, cnt = self.left, self.right, self.cnt
        out = []
        # right-first walk: deeper positions come out first
        stack = [(self.version[u], 0, self.size)]
        while stack and len(out) < k:
            node, lo, hi = stack.pop()
            if not cnt[node] or hi <= min_depth:
                continue
            if hi - lo == 1:
                out.append(lo)
                continue
            mid = (lo + hi) // 2
            stack.append((left[node], lo, mid))
            stack.append((right[node], mid, hi))
        anc = self.idx.ancestor_at_depth
        color = self.color
        result = []
        for d in out:
            x = anc(u, d)
            result.append((x, color[x]))
        return result


def k_nearest_distinct_ancestors(dai: DistinctAncestorIndex, u: int, k: int) -> list:
    return dai.nearest(u, k)


@dataclass(frozen=True)
class MinorityQuery:
    i: int
    j: int
    alpha: Fraction
    length: int

    @property
    def threshold(self) -> Fraction:
        return self.alpha * self.length

    def is_minority_count(self, freq: int) -> bool:
        return 0 < freq and freq <= self.threshold


def candidate_reach(alpha: Fraction) -> int:
    """Distinct colors collected per endpoint: 2 * ceil(2 / alpha).

    With this reach, a path holding at most that many distinct colors is fully
    covered from both ends, so every surviving candidate is a true minority.
    """
    return 2 * math.ceil(2 / alpha)


def parse_alpha(alpha) -> Fraction:
    value = Fraction(alpha) if not isinstance(alpha, float) else Fraction(str(alpha))
    if not 0 < value <= 1:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    return value


@dataclass
class MinorityTrace:
    """What a single query did; filled in when passed to a query."""

    phase: int = 0  # 3 = overlap verification hit, 4 = sampling, 0 = nothing to sample
    candidates: int = 0
    verifications: int = 0
    draws: int = 0  # sampled candidates checked by a Las Vegas query
    pruned: list = field(default_factory=list)


class MinorityIndex:
    """Static structures shared by all minority queries on one tree."""

    def __init__(self, tree: ColoredTree, idx: TreeIndex | None = None,
                 vf: VirtualForest | None = None):
        self.tree = tree
        self.idx = idx if idx is not None else build_index(tree)
        self.vf = vf if vf is not None else VirtualForest(tree, self.idx)
        self.dai = DistinctAncestorIndex(tree, self.idx, self.vf)

    def query(self, i: int, j: int, alpha) -> MinorityQuery:
        n = self.tree.n
        if not (1 <= i <= n and 1 <= j <= n):
            raise IndexError(f"query nodes ({i}, {j}) out of range 1..{n}")
        a = parse_alpha(alpha)
        idx = self.idx
        w = idx.lca(i, j)
        length = idx.depth[i] + idx.depth[j] - 2 * idx.depth[w] + 1
        return MinorityQuery(i, j, a, length)

    def _count_from(self, x: int, dw: int) -> int:
        """Occurrences of x's color on the vertical path from x up to depth ``dw``."""
        vf, depth = self.vf, self.idx.depth
        lo, hi = 0, vf.vdepth[x] - 1  # largest k with depth(vla(x, k)) >= dw
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if depth[vf.vlevel_ancestor(x, mid)] >= dw:
                lo = mid
            else:
                hi = mid - 1
        return lo + 1

    def candidates(self, mq: MinorityQuery, trace: MinorityTrace | None = None):
        """Phases 1-3.  Returns (verified color or None, remaining candidates in draw order)."""
        idx, vf = self.idx, self.vf
        i, j = mq.i, mq.j
        k = candidate_reach(mq.alpha)
        w = idx.lca(i, j)
        dw = idx.depth[w]
        sides = [self.dai.nearest(i, k, dw), self.dai.nearest(j, k, dw)]

        # drop colors already too frequent on one vertical half
        pruned = set()
        for side in sides:
            for x, c in side:
                if self._count_from(x, dw) > mq.threshold:
                    pruned.add(c)
        if trace is not None:
            trace.pruned = sorted(pruned)
        near_i = {c: x for x, c in sides[0] if c not in pruned}
        near_j = {c: x for x, c in sides[1] if c not in pruned}

        # colors seen from both ends have both extremal occurrences located
        for c, x in near_i.items():
            y = near_j.get(c)
            if y is None:
                continue
            if trace is not None:
                trace.verifications += 1
            if mq.is_minority_count(vf.path_color_frequency(x, y)):
                if trace is not None:
                    trace.phase = 3
                return c, []
        pool = [c for c in near_i if c not in near_j] + [c for c in near_j if c not in near_i]
        if trace is not None:
            trace.candidates = len(pool)
        return None, pool

    def frequency(self, mq: MinorityQuery, c: int) -> int:
        ends = self.vf.path_color_endpoints(mq.i, mq.j, c)
        return 0 if ends is None else self.vf.path_color_frequency(*ends)

    def monte_carlo(self, i: int, j: int, alpha, rng: np.random.Generator,
                    trace: MinorityTrace | None = None) -> int:
        return minority_monte_carlo(self.query(i, j, alpha), self, rng, trace)

    def las_vegas(self, i: int, j: int, alpha, rng: np.random.Generator,
                  trace: MinorityTrace | None = None) -> int:
        return minority_las_vegas(self.query(i, j, alpha), self, rng, trace)


def minority_monte_carlo(mq: MinorityQuery, deps: MinorityIndex, rng: np.random.Generator,
                         trace: MinorityTrace | None = None) -> int:
    """A random surviving candidate (unverified), or NONE when none survive."""
    hit, pool = deps.candidates(mq, trace)
    if hit is not None:
        return hit
    if not pool:
        return NONE
    if trace is not None:
        trace.phase = 4
    return pool[int(rng.integers(len(pool)))]


def minority_las_vegas(mq: MinorityQuery, deps: MinorityIndex, rng: np.random.Generator,
                       trace: MinorityTrace | None = None) -> int:
    """A verified alpha-minority, or NONE exactly when the path has none."""
    hit, pool = deps.candidates(mq, trace)
    if hit is not None:
        return hit
    if trace is not None and pool:
        trace.phase = 4
    for r in rng.permutation(len(pool)):
        c = pool[int(r)]
        if trace is not None:
            trace.verifications += 1
            trace.draws += 1
        if mq.is_minority_count(deps.frequency(mq, c)):
            return c
    return NONE


def query_rng(seed: int, query_number: int) -> np.random.Generator:
    """Independent, reproducible stream for one query."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, query_number])))
