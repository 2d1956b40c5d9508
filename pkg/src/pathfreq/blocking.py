"""Marked sets, block partitions and the four-level block hierarchy.

A marked set for factor ``t`` is closed under LCA and leaves only unmarked
components of fewer than ``t`` nodes.  Removing the marked nodes splits the
tree into unmarked components; each marked node ``u`` absorbs the component
containing its parent (an *internal* block), and every other component hangs
below a marked node and becomes a *leaf* block of its own.

Higher levels are built on the compressed tree of the previous marked set and
lifted back to the original nodes, so every level-k block is a union of
level-(k-1) blocks.  There, hanging components are folded into the internal
block of the marked node above them while that block stays within twice the
relative factor, which keeps the block count near n/t on bushy trees.  When
that is not enough (a star has one hanging leaf per child), the limit doubles
until at most 2n/t blocks remain.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import numpy as np

from .tree_core import NONE, RootedIndex

INTERNAL = "internal"
LEAF = "leaf"


# ---------------------------------------------------------------------------
# auxiliary trees and marking


@dataclass
class AuxTree:
    vertices: list  # sorted by preorder
    parent: dict  # vertex -> nearest ancestor vertex, NONE for the top


def build_auxiliary_tree(idx: RootedIndex, nodes) -> AuxTree:
    """LCA-closed compression of ``idx``'s tree induced by ``nodes``."""
    tin = idx.tin
    base = sorted(set(nodes), key=tin.__getitem__)
    if not base:
        raise ValueError("auxiliary tree of an empty set")
    verts = set(base)
    for a, b in zip(base, base[1:]):
        verts.add(idx.lca(a, b))
    verts = sorted(verts, key=tin.__getitem__)
    return AuxTree(verts, _nearest_ancestors(idx, verts))


def _nearest_ancestors(idx: RootedIndex, verts_sorted) -> dict:
    parent = {}
    stack = []
    for v in verts_sorted:
        while stack and not idx.is_ancestor(stack[-1], v):
            stack.pop()
        parent[v] = stack[-1] if stack else NONE
        stack.append(v)
    return parent


def mark_nodes(idx: RootedIndex, t: int) -> list:
    """Marked nodes for factor ``t`` on an arbitrary rooted tree, sorted by preorder."""
    size, parent, children = idx.size, idx.parent, idx.children
    rule1 = [
        u for u in idx.order
        if size[u] >= t and all(size[v] < t for v in children[u])
    ]
    aux = build_auxiliary_tree(idx, rule1)
    marked = set(aux.vertices)

    # gap filling on vertical segments between a marked node and its marked ancestor
    def top_below(u, a):
        if a == NONE:
            return idx.root
        return idx.level_ancestor(u, idx.depth[u] - idx.depth[a] - 1)

    heap = []
    for u, a in aux.parent.items():
        if u != idx.root:
            heap.append((-(size[top_below(u, a)] - size[u]), u, a))
    heapq.heapify(heap)
    while heap:
        neg, u, a = heapq.heappop(heap)
        if -neg < t:
            break
        v = parent[u]
        while size[v] - size[u] < t:
            v = parent[v]
        marked.add(v)
        if v != idx.root:
            heapq.heappush(heap, (-(size[top_below(v, a)] - size[v]), v, a))
    return sorted(marked, key=idx.tin.__getitem__)


@dataclass
class MarkedSet:
    t: int
    members: list
    is_marked: np.ndarray
    compressed_parent: dict
    compressed_index: RootedIndex = field(repr=False, default=None)

    def __contains__(self, u) -> bool:
        return bool(self.is_marked[u])


def _marked_set(idx: RootedIndex, t: int, members) -> MarkedSet:
    flags = np.zeros(idx.N + 1, dtype=bool)
    flags[list(members)] = True
    cparent = _nearest_ancestors(idx, members)
    pos = {u: k + 1 for k, u in enumerate(members)}
    compact = [0] * (len(members) + 1)
    for u, p in cparent.items():
        compact[pos[u]] = pos[p] if p else 0
    return MarkedSet(t, list(members), flags, cparent, RootedIndex(compact))


def compute_marked(tree, idx: RootedIndex, t: int) -> MarkedSet:
    n = idx.N
    if not 1 <= t <= n:
        raise ValueError(f"blocking factor {t} outside 1..{n}")
    return _marked_set(idx, t, mark_nodes(idx, t))


# ---------------------------------------------------------------------------
# partitions


@dataclass
class BlockPartition:
    block_of: np.ndarray
    blocks: list  # member lists, each sorted by preorder
    representative: list
    kind: list
    top: list

    @property
    def count(self) -> int:
        return len(self.blocks)


def partition_nodes(idx: RootedIndex, is_marked, absorb_limit: int = 0) -> tuple:
    """Raw partition as (block_of list, blocks, reps, kinds, tops), blocks ordered by top preorder.

    With ``absorb_limit`` set, components hanging below a marked node join that
    node's internal block while the block keeps at most ``absorb_limit`` nodes.
    """
    N, parent = idx.N, idx.parent
    comp = [0] * (N + 1)  # component id + 1 for unmarked nodes
    comp_top = []
    for v in idx.order:
        if is_marked[v]:
            continue
        p = parent[v]
        if p and not is_marked[p]:
            comp[v] = comp[p]
        else:
            comp_top.append(v)
            comp[v] = len(comp_top)
    owner = [NONE] * (len(comp_top) + 1)
    for u in idx.order:
        if is_marked[u]:
            p = parent[u]
            if p and not is_marked[p]:
                k = comp[p]
                if owner[k] != NONE:
                    raise AssertionError("marked set is not closed under LCA")
                owner[k] = u
    absorbed = [NONE] * (len(comp_top) + 1)
    if absorb_limit:
        comp_size = [0] * (len(comp_top) + 1)
        for v in idx.order:
            comp_size[comp[v]] += 1
        fill = {}
        for k in range(1, len(comp_top) + 1):
            w = parent[comp_top[k - 1]]
            if owner[k] == NONE and w:
                if w not in fill:
                    p = parent[w]
                    fill[w] = 1 + (comp_size[comp[p]] if p and not is_marked[p] else 0)
                if fill[w] + comp_size[k] <= absorb_limit:
                    fill[w] += comp_size[k]
                    absorbed[k] = w
    raw = []  # (top, rep, kind, comp id or 0, marked node or 0)
    for u in idx.order:
        if is_marked[u]:
            p = parent[u]
            k = comp[p] if p and not is_marked[p] else 0
            top = comp_top[k - 1] if k else u
            raw.append((top, u, INTERNAL, k, u))
    for k in range(1, len(comp_top) + 1):
        if owner[k] == NONE and absorbed[k] == NONE:
            h = comp_top[k - 1]
            w = parent[h]
            if w == NONE:
                raise AssertionError("unmarked component without a marked node")
            raw.append((h, w, LEAF, k, 0))
    tin = idx.tin
    raw.sort(key=lambda r: tin[r[0]])
    block_of = [0] * (N + 1)
    comp_block = [0] * (len(comp_top) + 1)
    reps, kinds, tops = [], [], []
    for b, (top, rep, kind, k, u) in enumerate(raw):
        reps.append(rep)
        kinds.append(kind)
        tops.append(top)
        if u:
            block_of[u] = b
        if k:
            comp_block[k] = b
    for k in range(1, len(comp_top) + 1):
        if absorbed[k] != NONE:
            comp_block[k] = block_of[absorbed[k]]
    blocks = [[] for _ in raw]
    for v in idx.order:
        b = comp_block[comp[v]] if comp[v] else block_of[v]
        block_of[v] = b
        blocks[b].append(v)
    return block_of, blocks, reps, kinds, tops


def compute_partition(tree, idx: RootedIndex, ms: MarkedSet) -> BlockPartition:
    block_of, blocks, reps, kinds, tops = partition_nodes(idx, ms.is_marked)
    return BlockPartition(np.asarray(block_of, dtype=np.int64), blocks, reps, kinds, tops)


def block_sizes_ok(part: BlockPartition, t: int) -> bool:
    return all(len(b) <= 2 * t for b in part.blocks)


# ---------------------------------------------------------------------------
# hierarchy


def hierarchy_factors(n: int, t1: int) -> tuple:
    L = max(2, math.ceil(math.log2(n))) if n > 1 else 2
    LL = max(1, math.ceil(math.log2(L)))
    root = math.isqrt(L - 1) + 1 if L > 1 else 1  # ceil(sqrt(L))
    t2 = t1 * LL
    t3 = t2 * root
    t4 = t3 * root
    return L, LL, tuple(min(t, n) if n else t for t in (t1, t2, t3, t4))


def default_t1(n: int, word_size: int = 64) -> int:
    _, LL, _ = hierarchy_factors(n, 1)
    return max(1, math.ceil(math.sqrt(n / word_size) / LL))


@dataclass
class Level:
    t: int
    marked: MarkedSet
    partition: BlockPartition
    degenerate: bool = False

    @property
    def blocks(self):
        return self.partition.blocks

    @property
    def block_of(self):
        return self.partition.block_of


class BlockHierarchy:
    """Four nested block partitions for factors t1 <= t2 <= t3 <= t4.

    ``sub_blocks[k][B]`` lists the level-k blocks inside level-(k+1) block
    ``B`` in preorder of their tops (the block tree's local numbering);
    ``local_index[k][b]`` is the position of level-k block ``b`` in that list and
    ``bt_parent[k][b]`` the local index of its parent in the block tree (-1 at the root).
    Levels are numbered 1..4; index 0 of these lists is unused.
    """

    def __init__(self, tree, idx: RootedIndex, t1: int):
        if t1 < 1:
            raise ValueError("t1 must be at least 1")
        n = idx.N
        self.n = n
        self.idx = idx
        self.L, self.LL, self.factors = hierarchy_factors(n, t1)
        self.levels = [None]
        prev = None
        for k, t in enumerate(self.factors, start=1):
            if t >= n:
                level = self._single_block(prev)
            elif prev is None:
                ms = compute_marked(tree, idx, t)
                level = Level(t, ms, compute_partition(tree, idx, ms))
            else:
                level = self._lift(prev, math.ceil(t / prev.t), t)
            level.t = t
            self.levels.append(level)
            prev = level
        self._block_trees()

    # -- construction helpers --------------------------------------------
    def _single_block(self, prev):
        idx = self.idx
        if prev is None:
            members = [idx.root]
        else:
            members = [prev.marked.members[0]]
        ms = _marked_set(idx, self.n, members)
        order = list(idx.order)
        part = BlockPartition(np.zeros(self.n + 1, dtype=np.int64), [order],
                              [members[0]], [INTERNAL], [idx.root])
        return Level(self.n, ms, part, degenerate=True)

    def _lift(self, prev: Level, rel: int, t: int) -> Level:
        idx = self.idx
        pm = prev.marked
        cidx = pm.compressed_index
        m = len(pm.members)
        rel = max(1, min(rel, m))
        rmembers = mark_nodes(cidx, rel)
        flags = [False] * (m + 1)
        for r in rmembers:
            flags[r] = True
        # bushy shapes (stars) leave one block per hanging leaf; fold more until
        # the block count is back near n/t, at the price of larger blocks
        cap = max(1, 2 * idx.N // t)
        limit = 2 * rel
        while True:
            rblock_of, _, rreps, rkinds, _ = partition_nodes(cidx, flags, absorb_limit=limit)
            if len(rreps) <= cap or limit > m:
                break
            limit *= 2
        pos = {u: k + 1 for k, u in enumerate(pm.members)}
        prev_part = prev.partition
        lifted = [rblock_of[pos[rep]] for rep in prev_part.representative]
        raw_block = np.asarray(lifted, dtype=np.int64)[prev_part.block_of]
        members = [pm.members[r - 1] for r in rmembers]
        ms = _marked_set(idx, t, members)
        # renumber by preorder of block tops
        nb = len(rreps)
        tops = [NONE] * nb
        tin, depth = idx.tin, idx.depth
        for b_prev, b in enumerate(lifted):
            top = prev_part.top[b_prev]
            if tops[b] == NONE or depth[top] < depth[tops[b]]:
                tops[b] = top
        order = sorted(range(nb), key=lambda b: tin[tops[b]])
        remap = np.empty(nb, dtype=np.int64)
        remap[order] = np.arange(nb)
        block_of = remap[raw_block]
        block_of[0] = 0
        blocks = [[] for _ in range(nb)]
        bo = block_of.tolist()
        for v in idx.order:
            blocks[bo[v]].append(v)
        reps = [pm.members[rreps[b] - 1] for b in order]
        kinds = [rkinds[b] for b in order]
        part = BlockPartition(block_of, blocks, reps, kinds, [tops[b] for b in order])
        return Level(t, ms, part)

    def _block_trees(self):
        idx = self.idx
        parent = idx.parent
        self.sub_blocks = [None] * 5
        self.local_index = [None] * 5
        self.bt_parent = [None] * 5
        self.bt_depth = [None] * 5
        for k in range(1, 4):
            low, high = self.levels[k].partition, self.levels[k + 1].partition
            low_of = low.block_of.tolist()
            high_of = high.block_of.tolist()
            subs = [[] for _ in range(high.count)]
            local = [0] * low.count
            for b, top in enumerate(low.top):  # low blocks already in top preorder
                B = high_of[top]
                local[b] = len(subs[B])
                subs[B].append(b)
            bt_parent = [-1] * low.count
            bt_depth = [0] * low.count
            for b, top in enumerate(low.top):
                p = parent[top]
                if p and high_of[p] == high_of[top]:
                    pb = low_of[p]
                    bt_parent[b] = local[pb]
                    bt_depth[b] = bt_depth[pb] + 1
            self.sub_blocks[k] = subs
            self.local_index[k] = local
            self.bt_parent[k] = bt_parent
            self.bt_depth[k] = bt_depth

    # -- lookups -----------------------------------------------------------
    def _level(self, level: int) -> Level:
        if not 1 <= level <= 4:
            raise IndexError(f"level {level} outside 1..4")
        return self.levels[level]

    def block_of(self, u: int, level: int) -> int:
        return int(self._level(level).partition.block_of[u])

    def representative(self, block: int, level: int) -> int:
        return self._level(level).partition.representative[block]

    def block_count(self, level: int) -> int:
        return self._level(level).partition.count

    def parent_block(self, level: int, b: int) -> int:
        """Level-``level`` block holding the block-tree parent of level block ``b``, or -1."""
        lp = self.bt_parent[level][b]
        if lp < 0:
            return -1
        B = self.levels[level + 1].partition.block_of[self.levels[level].partition.top[b]]
        return self.sub_blocks[level][int(B)][lp]

    def encoding(self, level: int, B: int) -> tuple:
        """Canonical block-tree encoding of level-(level+1) block ``B``: local parent sequence."""
        return tuple(self.bt_parent[level][b] for b in self.sub_blocks[level][B])


def compute_hierarchy(tree, idx: RootedIndex, t1: int) -> BlockHierarchy:
    return BlockHierarchy(tree, idx, t1)


def block_of(h: BlockHierarchy, u: int, level: int) -> int:
    return h.block_of(u, level)


def representative(h: BlockHierarchy, block: int, level: int) -> int:
    return h.representative(block, level)
