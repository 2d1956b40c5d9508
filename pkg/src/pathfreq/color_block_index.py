"""Locating color occurrences relative to the block hierarchy.

Three kinds of static dictionaries sit on top of a :class:`BlockHierarchy`:

* presence masks: ``(color, level-k block)`` -> bitmask over the block's
  level-(k-1) sub-blocks (in block-tree preorder) that contain the color;
* topmost occurrences: ``(color, block)`` -> a minimum-depth occurrence inside the block;
* chain occurrences: ``(color, internal block)`` -> the deepest occurrence on the
  vertical chain from the block's representative up to its top.  Every child
  block hangs directly below the representative, so this is the occurrence a
  path climbing out of a child block meets first inside its parent block.

Block trees are small, so lowest-marked-ancestor answers are memoized per
canonical block-tree encoding (:class:`SmallTreeTables`).
"""

from __future__ import annotations

from .blocking import INTERNAL, BlockHierarchy
from .tree_core import NONE
from .virtual_trees import VirtualForest

SMALL_TREE_CAP = 16


class PreconditionError(ValueError):
    pass


class SmallTreeTables:
    """Memoized small-tree queries keyed by the block tree's parent sequence.

    A block tree is given as a tuple of local parent indices in preorder
    (``-1`` for the root).  Trees above ``cap`` nodes are answered directly.
    """

    def __init__(self, cap: int = SMALL_TREE_CAP, debug: bool = False):
        self.cap = cap
        self.debug = debug
        self._lma: dict = {}
        self._subset: dict = {}

    def lowest_marked_ancestor(self, parents: tuple, sigma: int, u: int) -> int:
        if not sigma:
            raise ValueError("no marked node")
        if len(parents) > self.cap:
            return _lma_direct(parents, sigma, u)
        key = (parents, sigma, u)
        hit = self._lma.get(key)
        if hit is None:
            hit = _lma_direct(parents, sigma, u)
            self._lma[key] = hit
        elif self.debug:
            assert hit == _lma_direct(parents, sigma, u)
        return hit

    def reachable_subset(self, parents: tuple, sigma_v: int, sigma_e: int, e: int) -> int:
        """Nodes unmarked in ``sigma_v`` whose first ``sigma_e``-marked edge toward the root is ``e``.

        Edges are named by their child endpoint.
        """
        if not (sigma_e >> e) & 1:
            raise ValueError(f"edge {e} is not marked")
        if len(parents) > self.cap:
            return _subset_direct(parents, sigma_v, sigma_e, e)
        key = (parents, sigma_v, sigma_e, e)
        hit = self._subset.get(key)
        if hit is None:
            hit = _subset_direct(parents, sigma_v, sigma_e, e)
            self._subset[key] = hit
        return hit

    @property
    def cached(self) -> int:
        return len(self._lma) + len(self._subset)


def _lma_direct(parents, sigma: int, u: int) -> int:
    x = u
    while x >= 0:
        if (sigma >> x) & 1:
            return x
        x = parents[x]
    # preorder numbering: the lowest set bit has no marked proper ancestor
    return (sigma & -sigma).bit_length() - 1


def _subset_direct(parents, sigma_v: int, sigma_e: int, e: int) -> int:
    psi = 0
    for u in range(len(parents)):
        if (sigma_v >> u) & 1:
            continue
        x = u
        while x > 0 and not (sigma_e >> x) & 1:
            x = parents[x]
        if x == e:
            psi |= 1 << u
    return psi


def lowest_marked_block_ancestor(st: SmallTreeTables, block_tree: tuple, sigma: int, u: int) -> int:
    return st.lowest_marked_ancestor(tuple(block_tree), sigma, u)


def reachable_subset(st: SmallTreeTables, block_tree: tuple, sigma_v: int, sigma_e: int, e: int) -> int:
    return st.reachable_subset(tuple(block_tree), sigma_v, sigma_e, e)


class ColorBlockIndex:
    def __init__(self, tree, h: BlockHierarchy, vf: VirtualForest, debug: bool = False):
        self.tree = tree
        self.h = h
        self.vf = vf
        self.idx = h.idx
        self.small = SmallTreeTables(debug=debug)
        color = vf.color
        self.color = color

        # distinct colors per block, per level
        self.block_colors = [None]
        for k in range(1, 5):
            part = h.levels[k].partition
            self.block_colors.append([sorted({color[v] for v in b}) for b in part.blocks])

        # presence[k]: (c, level-(k+1) block) -> mask over its level-k sub-blocks
        self.presence = [None]
        for k in range(1, 4):
            high_of = h.levels[k + 1].partition.block_of
            tops = h.levels[k].partition.top
            local = h.local_index[k]
            masks = {}
            for b, cols in enumerate(self.block_colors[k]):
                B = int(high_of[tops[b]])
                bit = 1 << local[b]
                for c in cols:
                    key = (c, B)
                    masks[key] = masks.get(key, 0) | bit
            self.presence.append(masks)

        depth = self.idx.depth
        parent = self.idx.parent
        self.topmost = [None]
        self.chain = [None]
        for k in range(1, 4):
            part = h.levels[k].partition
            top_d = {}
            for b, members in enumerate(part.blocks):
                for v in members:  # preorder: the first hit per color is not deeper than later ones
                    key = (color[v], b)
                    cur = top_d.get(key)
                    if cur is None or depth[v] < depth[cur]:
                        top_d[key] = v
            self.topmost.append(top_d)
            chain = {}
            for b, rep in enumerate(part.representative):
                if part.kind[b] != INTERNAL:
                    continue
                stop = part.top[b]
                x = rep
                while True:
                    chain.setdefault((color[x], b), x)
                    if x == stop:
                        break
                    x = parent[x]
            self.chain.append(chain)
        self._encodings = [None] + [
            [h.encoding(k, B) for B in range(h.block_count(k + 1))] for k in range(1, 4)
        ]

    # -- membership ------------------------------------------------------
    def color_mask(self, c: int, k: int, B: int):
        """Mask over level-k sub-blocks of level-(k+1) block B holding color c, or None."""
        return self.presence[k].get((c, B))

    def in_block(self, c: int, x: int, k: int) -> bool:
        """Whether color c occurs in B_k(x)."""
        h = self.h
        if k == 1:
            B = int(h.levels[2].partition.block_of[x])
            m = self.presence[1].get((c, B))
            if m is None:
                return False
            b = int(h.levels[1].partition.block_of[x])
            return bool((m >> h.local_index[1][b]) & 1)
        B = int(h.levels[k].partition.block_of[x])
        return (c, B) in self.presence[k - 1]

    # -- occurrences -------------------------------------------------------
    def lowest_colored_ancestor_fast(self, x: int, c: int, k: int) -> int:
        """Deepest c-node on x's root path, given c in B_k(x) but not in B_(k-1)(x)."""
        h = self.h
        B = int(h.levels[k].partition.block_of[x])
        sigma = self.presence[k - 1].get((c, B))
        if sigma is None:
            raise PreconditionError(f"color {c} absent from the level-{k} block of node {x}")
        low = h.levels[k - 1].partition
        g0 = int(low.block_of[x])
        u = h.local_index[k - 1][g0]
        if (sigma >> u) & 1:
            raise PreconditionError(f"color {c} present in the level-{k - 1} block of node {x}")
        enc = self._encodings[k - 1][B]
        found = self.small.lowest_marked_ancestor(enc, sigma, u)
        b = h.sub_blocks[k - 1][B][found]
        anc = found < u and _is_block_ancestor(enc, found, u)
        if anc:
            hit = self.chain[k - 1].get((c, b))
            if hit is not None:
                return hit
        return self.vf.vparent[self.topmost[k - 1][(c, b)]]

    def first_occurrence_on_path(self, i: int, j: int, levels: tuple, c: int) -> int:
        """The c-node on P(i, j) nearest to i, or NONE when c is not on the path.

        Requires c in B_k(i) minus B_(k-1)(i) and in B_k'(j) minus B_(k'-1)(j)
        for ``levels = (k, k')``.
        """
        k, k2 = levels
        if self.color[i] == c:
            return i
        idx = self.idx
        w = idx.lca(i, j)
        dw = idx.depth[w]
        a = self.lowest_colored_ancestor_fast(i, c, k)
        if a != NONE and idx.depth[a] >= dw:
            return a
        y = j if self.color[j] == c else self.lowest_colored_ancestor_fast(j, c, k2)
        if y != NONE and idx.depth[y] >= dw:
            # the located j-side occurrence sits below a; climb to just under a
            return self.vf.topmost_below(y, a)
        return NONE


def _is_block_ancestor(parents, a: int, u: int) -> bool:
    x = u
    while x > a:
        x = parents[x]
    return x == a


def build_color_block_index(tree, h: BlockHierarchy, vf: VirtualForest, debug: bool = False):
    return ColorBlockIndex(tree, h, vf, debug=debug)
