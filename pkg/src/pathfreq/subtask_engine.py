"""Path maximum g-value color queries.

The colors on a query path ``P(i, j)`` split into ten disjoint classes by
whether they occur in the level-1/2/3 blocks around ``i`` and ``j``:

====  =====================================================  ==========
class membership                                             source
====  =====================================================  ==========
1     outside B3(i) and B3(j)                                T1 -> S1
2     in B3(i) \\ B2(i), outside B3(j)                        T2 -> S1
3     in B2(i) \\ B1(i), outside B3(j)                        T3 -> S1
4     mirror of 2                                            T2 -> S1
5     in B3(i) and B3(j), outside B2(i) and B2(j)            T5 -> S2
6     in B2(i) \\ B1(i) and B3(j) \\ B2(j)                     scan -> S2
7     mirror of 3                                            T3 -> S1
8     mirror of 6                                            scan -> S2
9     in B2(i) \\ B1(i) and B2(j) \\ B1(j)                     scan -> S2
10    in B1(i) or B1(j)                                      scan -> S1
====  =====================================================  ==========

S1 holds bare colors whose path endpoints are found with colored-ancestor
searches; S2 holds ``(color, l, r)`` triples with endpoints already located.

Every table relies on the same fact: for colors absent from both endpoint
blocks, their occurrences on ``P(i, j)`` lie on the unique stretch between the
two (connected) blocks, so the answer depends only on the block pair.
Tables are filled by sweeps that walk the tree from the top of each source
block; see :mod:`pathfreq._kernels_py`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .blocking import BlockHierarchy, compute_hierarchy, default_t1
from .color_block_index import ColorBlockIndex
from .gvalue import GFunction, make_lfe_g, make_mode_g, make_sum_g
from .tree_core import NONE, ColoredTree, TreeIndex, build_index
from .virtual_trees import VirtualForest

NEG = -(1 << 62)
STRATIFIED = "stratified"
FALLBACK = "fallback"


@dataclass
class QueryResult:
    color: int
    gvalue: int
    endpoints: tuple

    @property
    def frequency(self) -> int:
        """Positive occurrence count for mode / least-frequent queries."""
        return abs(self.gvalue)


@dataclass
class CandidateSets:
    s1: set = field(default_factory=set)
    s2: list = field(default_factory=list)
    by_subtask: dict = field(default_factory=dict)


def _csr(lists):
    ptr = np.zeros(len(lists) + 1, dtype=np.int64)
    ptr[1:] = np.cumsum([len(x) for x in lists])
    flat = np.fromiter((c for x in lists for c in x), dtype=np.int64, count=int(ptr[-1]))
    return ptr, flat


def _index_dtype(limit: int):
    for dt in (np.uint8, np.uint16, np.uint32):
        if limit < np.iinfo(dt).max:
            return dt
    return np.uint64


def stratification(t2: int, t3: int) -> list:
    """Blocking factors t3 = s_0 > s_1 > ... > t2 with s_(k+1) = t2 * log2(s_k / t2)^2."""
    seq = [t3]
    while seq[-1] > t2:
        r = seq[-1] / t2
        nxt = max(t2, math.ceil(t2 * math.log2(r) ** 2))
        if nxt >= seq[-1]:
            break
        seq.append(nxt)
    if seq[-1] != t2:
        seq.append(t2)
    return seq


class PathStructure:
    """Everything that does not depend on the g-function."""

    def __init__(self, tree: ColoredTree, t1: int | None = None, word_size: int = 64,
                 debug: bool = False):
        self.tree = tree
        self.n = tree.n
        self.idx: TreeIndex = build_index(tree)
        self.vf = VirtualForest(tree, self.idx)
        self.t1 = t1 if t1 is not None else default_t1(tree.n, word_size)
        self.h: BlockHierarchy = compute_hierarchy(tree, self.idx, self.t1)
        self.cbi = ColorBlockIndex(tree, self.h, self.vf, debug=debug)
        self._prepare()

    def _prepare(self):
        idx, h, n = self.idx, self.h, self.n
        nbrs = [[] for _ in range(n + 1)]
        for v in range(2, n + 1):
            p = idx.parent[v]
            nbrs[v].append(p)
            nbrs[p].append(v)
        self.adj_ptr = np.zeros(n + 2, dtype=np.int64)
        self.adj_ptr[2:] = np.cumsum([len(x) for x in nbrs[1:]])
        self.adj = np.fromiter((y for x in nbrs for y in x), dtype=np.int64)
        self._skeletons = {}
        self.block_of = [None] + [h.levels[k].partition.block_of for k in range(1, 5)]
        self.tops = [None] + [h.levels[k].partition.top for k in range(1, 5)]
        self.colors_csr = [None] + [_csr(self.cbi.block_colors[k]) for k in range(1, 5)]
        self.color_sets = [None] + [[set(c) for c in self.cbi.block_colors[k]] for k in range(1, 5)]

        # level-1 blocks inside each level-3 block, in preorder of their tops
        b3 = self.block_of[3]
        self.t1_in_t3 = [[] for _ in range(h.block_count(3))]
        for b, top in enumerate(self.tops[1]):
            self.t1_in_t3[int(b3[top])].append(b)
        # sorted node lists of level-3 blocks for the subtask-5 windows
        self.t3_nodes = [sorted(b) for b in h.levels[3].partition.blocks]

    def skeleton(self, level: int) -> tuple:
        """Adjacency that keeps every upward edge but only downward edges toward level-``level`` tops.

        A sweep targeting level-``level`` blocks first meets each block on the
        way from its start to the block top, so nothing else needs visiting.
        """
        hit = self._skeletons.get(level)
        if hit is None:
            idx, n = self.idx, self.n
            keep = np.zeros(n + 1, dtype=bool)
            keep[list(self.tops[level])] = True
            parent = idx.parent
            for v in reversed(idx.order):
                if keep[v] and v != idx.root:
                    keep[parent[v]] = True
            nbrs = [[] for _ in range(n + 1)]
            for v in idx.order:
                if v != idx.root:
                    nbrs[v].append(parent[v])
                    if keep[v]:
                        nbrs[parent[v]].append(v)
            ptr = np.zeros(n + 2, dtype=np.int64)
            ptr[2:] = np.cumsum([len(x) for x in nbrs[1:]])
            hit = (ptr, np.fromiter((y for x in nbrs for y in x), dtype=np.int64, count=int(ptr[-1])))
            self._skeletons[level] = hit
        return hit

    # class membership helpers
    def blocks_of(self, x: int) -> tuple:
        return tuple(int(self.block_of[k][x]) for k in range(1, 5))


class Engine:
    """Precomputed tables for one g-function over a :class:`PathStructure`."""

    def __init__(self, ps: PathStructure, g: GFunction, mode: str = STRATIFIED,
                 prefer_compiled: bool = True):
        if mode not in (STRATIFIED, FALLBACK):
            raise ValueError(f"unknown mode {mode!r}")
        self.ps = ps
        self.g = g
        self.mode = mode
        values = g.node_values
        evaluate = None if values is not None else g.eval_contracted
        if values is None:
            values = np.zeros(ps.n + 1, dtype=np.int64)
        # one sweeper per target level, each walking that level's skeleton
        self.sweepers = {
            level: kernels.make_sweeper(*ps.skeleton(level), ps.tree.color, values,
                                        ps.tree.n_colors, evaluate=evaluate,
                                        prefer_compiled=prefer_compiled)
            for level in (2, 3, 4)
        }
        self.extra_ops = 0
        self._build_t1()
        self._build_t2()
        self._build_t3()
        self._build_t5()
        self.build_ops = sum(sw.ops for sw in self.sweepers.values()) + self.extra_ops

    # -- table construction ---------------------------------------------
    def _universe(self, low_level: int, low_block: int, high_level: int, x: int):
        """Colors of B_high(x) that are absent from the level-low block ``low_block``."""
        ps = self.ps
        hb = int(ps.block_of[high_level][x])
        low = ps.color_sets[low_level][low_block]
        cols = [c for c in ps.cbi.block_colors[high_level][hb] if c not in low]
        self.extra_ops += len(ps.cbi.block_colors[high_level][hb])
        return np.asarray(cols, dtype=np.int64)

    def _build_t1(self):
        ps, sw = self.ps, self.sweepers[3]
        n3, n4 = ps.h.block_count(3), ps.h.block_count(4)
        ptr3, col3 = ps.colors_csr[3]
        uc = np.zeros((n3, n3), dtype=np.int64)
        uv = np.full((n3, n3), NEG, dtype=np.int64)
        for a in range(n3):
            top = ps.tops[3][a]
            univ = self._universe(3, a, 4, top)
            uc[a], uv[a] = sw.best_row(top, univ, ps.block_of[3], n3, ptr3, col3)
        ptr4, col4 = ps.colors_csr[4]
        rc = np.zeros((n4, n4), dtype=np.int64)
        rv = np.full((n4, n4), NEG, dtype=np.int64)
        for A in range(n4):
            banned = ps.cbi.block_colors[4][A]
            rc[A], rv[A] = self.sweepers[4].segmax_row(ps.tops[4][A], banned, ps.block_of[4], n4, ptr4, col4)
        b4 = np.asarray([ps.block_of[4][t] for t in ps.tops[3]], dtype=np.int64)
        c3, v3 = rc[np.ix_(b4, b4)], rv[np.ix_(b4, b4)]
        best_c, best_v = uc, uv
        for oc, ov in ((uc.T, uv.T), (c3, v3)):
            take = (ov > best_v) | ((ov == best_v) & (oc > 0) & ((best_c == 0) | (oc < best_c)))
            best_c = np.where(take, oc, best_c)
            best_v = np.where(take, ov, best_v)
        np.fill_diagonal(best_c, 0)
        self.extra_ops += 3 * n3 * n3
        self.T1 = best_c.astype(np.int32)

    def _relative_rows(self, source_level, high_level, targets_level, lookup):
        """Rows of relative sub-block indices for T2 / T3."""
        ps, sw = self.ps, self.sweepers[targets_level]
        ns = ps.h.block_count(source_level)
        nt = ps.h.block_count(targets_level)
        ptr, col = ps.colors_csr[targets_level]
        limit = max((len(x) for x in lookup.sizes), default=1)
        dt = _index_dtype(limit)
        none = np.iinfo(dt).max
        table = np.full((ns, nt), none, dtype=dt)
        lut = np.full(ps.tree.n_colors + 1, none, dtype=np.int64)
        # sources sharing a lookup block reuse one filled lut
        group = ps.block_of[lookup.level]
        tops = ps.tops[source_level]
        order = sorted(range(ns), key=lambda a: int(group[tops[a]]))
        current, touched = -1, []
        for a in order:
            top = tops[a]
            if int(group[top]) != current:
                lut[touched] = none
                current = int(group[top])
                touched = lookup.fill(lut, top)
            univ = self._universe(source_level, a, high_level, top)
            cols, _ = sw.best_row(top, univ, ps.block_of[targets_level], nt, ptr, col)
            row = lut[cols]
            row[cols == 0] = none
            table[a] = row
            self.extra_ops += nt
        return table, none

    def _build_t2(self):
        ps = self.ps
        self.T2, self.T2_NONE = self._relative_rows(2, 3, 3, _T1InT3(ps))

    def _build_t3(self):
        ps = self.ps
        self.T3, self.T3_NONE = self._relative_rows(1, 2, 3, _T1InT2(ps))

    def _build_t5(self):
        ps, sw, h = self.ps, self.sweepers[2], self.ps.h
        t2, t3 = h.factors[1], h.factors[2]
        ratio = max(1, math.ceil(t3 / t2))
        self.t5_width = 2 * math.ceil(math.log2(ratio)) if ratio > 1 else 0
        self.strata = stratification(t2, t3)
        n2, n3 = h.block_count(2), h.block_count(3)
        dt = np.uint8 if self.t5_width < 8 else np.uint16
        none = np.iinfo(dt).max
        self.T5_NONE = none
        table = np.full((n2, n2), none, dtype=dt)
        ptr2, col2 = ps.colors_csr[2]
        ptr3, col3 = ps.colors_csr[3]
        b3_of_t2 = np.asarray([ps.block_of[3][t] for t in ps.tops[2]], dtype=np.int64)
        sizes3 = np.asarray([len(x) for x in ps.t3_nodes], dtype=np.int64)
        lut = np.full(ps.tree.n_colors + 1, -1, dtype=np.int64)
        color = ps.vf.color
        for a in range(n2):
            top = ps.tops[2][a]
            univ = self._universe(2, a, 3, top)
            cols, _ = sw.best_row(top, univ, ps.block_of[2], n2, ptr2, col2,
                                  grp_of=ps.block_of[3], grp_ptr=ptr3, grp_col=col3)
            A = int(b3_of_t2[a])
            nodes = ps.t3_nodes[A]
            for pos in range(len(nodes) - 1, -1, -1):
                lut[color[nodes[pos]]] = pos
            lengths = sizes3[A] + np.where(b3_of_t2 == A, 0, sizes3[b3_of_t2])
            shifts = np.asarray([self._shift(int(x)) for x in lengths], dtype=np.int64)
            pos = lut[cols]
            row = np.where(cols > 0, pos >> shifts, none)
            table[a] = row.astype(dt)
            for v in nodes:
                lut[color[v]] = -1
            self.extra_ops += len(nodes) + n2
        self.T5 = table

    def _shift(self, length: int) -> int:
        return max(0, (length - 1).bit_length() - self.t5_width)

    # -- table accounting --------------------------------------------------
    def table_stats(self) -> dict:
        h = self.ps.h
        return {
            "T1": self.T1.size,
            "T2": self.T2.size,
            "T3": self.T3.size,
            "T5_entries": self.T5.size,
            "T5_bits": self.T5.size * self.t5_width,
            "t5_width": self.t5_width,
            "strata": list(self.strata),
            "blocks": [h.block_count(k) for k in range(1, 5)],
            "build_ops": self.build_ops,
        }

    # -- queries -----------------------------------------------------------
    def _check(self, i: int, j: int):
        n = self.ps.n
        if not (1 <= i <= n and 1 <= j <= n):
            raise IndexError(f"query nodes ({i}, {j}) out of range 1..{n}")

    def run_subtasks(self, i: int, j: int) -> CandidateSets:
        self._check(i, j)
        ps = self.ps
        cbi = ps.cbi
        bi, bj = ps.blocks_of(i), ps.blocks_of(j)
        out = CandidateSets()
        s1, s2 = out.s1, out.s2
        tally = out.by_subtask

        # 10: local colors
        local = set(ps.cbi.block_colors[1][bi[0]]) | set(ps.cbi.block_colors[1][bj[0]])
        s1 |= local
        tally[10] = len(local)
        # 1: global colors
        c = int(self.T1[bi[2], bj[2]])
        if c:
            s1.add(c)
        tally[1] = int(c != 0)
        # 2 / 4 and 3 / 7: one level-1 block's colors each
        for sub, bx, by in ((2, bi, bj), (4, bj, bi)):
            r = int(self.T2[bx[1], by[2]])
            if r != self.T2_NONE:
                beta = ps.t1_in_t3[bx[2]][r]
                s1.update(cbi.block_colors[1][beta])
                tally[sub] = len(cbi.block_colors[1][beta])
        for sub, bx, by in ((3, bi, bj), (7, bj, bi)):
            r = int(self.T3[bx[0], by[2]])
            if r != self.T3_NONE:
                beta = ps.h.sub_blocks[1][bx[1]][r]
                s1.update(cbi.block_colors[1][beta])
                tally[sub] = len(cbi.block_colors[1][beta])

        inb = cbi.in_block
        fo = cbi.first_occurrence_on_path

        def emit(sub, c, ki, kj):
            left = fo(i, j, (ki, kj), c)
            if left == NONE:
                return
            right = fo(j, i, (kj, ki), c)
            s2.append((c, left, right))
            tally[sub] = tally.get(sub, 0) + 1

        # 5: both level-3 blocks, neither level-2 block
        def in_class5(c):
            return (inb(c, i, 3) and inb(c, j, 3)
                    and not inb(c, i, 2) and not inb(c, j, 2))

        for c in self._subtask5_candidates(i, j, bi, bj):
            if in_class5(c):
                emit(5, c, 3, 3)
        # 6 and 9 scan B2(i); 8 scans B2(j)
        for c in cbi.block_colors[2][bi[1]]:
            if inb(c, i, 1):
                continue
            if inb(c, j, 2):
                if not inb(c, j, 1):
                    emit(9, c, 2, 2)
            elif inb(c, j, 3):
                emit(6, c, 2, 3)
        for c in cbi.block_colors[2][bj[1]]:
            if inb(c, j, 1) or inb(c, i, 2):
                continue
            if inb(c, i, 3):
                emit(8, c, 3, 2)
        return out

    def _subtask5_candidates(self, i, j, bi, bj):
        ps = self.ps
        if self.mode == FALLBACK:
            return ps.cbi.block_colors[3][bi[2]]
        q = int(self.T5[bi[1], bj[1]])
        if q == self.T5_NONE:
            return ()
        first = ps.t3_nodes[bi[2]]
        second = ps.t3_nodes[bj[2]] if bj[2] != bi[2] else []
        length = len(first) + len(second)
        shift = self._shift(length)
        lo, hi = q << shift, min(length, (q + 1) << shift)
        color = ps.vf.color
        out = []
        for p in range(lo, hi):
            v = first[p] if p < len(first) else second[p - len(first)]
            out.append(color[v])
        return dict.fromkeys(out)

    def query_max_gvalue(self, i: int, j: int, candidates: CandidateSets | None = None) -> QueryResult:
        cand = candidates if candidates is not None else self.run_subtasks(i, j)
        vf, g = self.ps.vf, self.g
        best = None
        for c in cand.s1:
            ends = vf.path_color_endpoints(i, j, c)
            if ends is None:
                continue
            v = g.eval_contracted(*ends)
            if best is None or v > best[1] or (v == best[1] and c < best[0]):
                best = (c, v, ends)
        for c, left, right in cand.s2:
            v = g.eval_contracted(left, right)
            if best is None or v > best[1] or (v == best[1] and c < best[0]):
                best = (c, v, (left, right))
        if best is None:
            raise AssertionError(f"no candidate color found for path ({i}, {j})")
        return QueryResult(*best)

    # -- reference decomposition ----------------------------------------------
    def decompose_colors(self, i: int, j: int) -> list:
        return decompose_colors(self.ps, i, j)


def decompose_colors(ps: PathStructure, i: int, j: int) -> list:
    """Ten disjoint color classes of P(i, j) by explicit set algebra (index 0 = class 1)."""
    idx = ps.idx
    w = idx.lca(i, j)
    path = set()
    color = ps.vf.color
    for x in (i, j):
        while True:
            path.add(color[x])
            if x == w:
                break
            x = idx.parent[x]
    sets = ps.color_sets
    bi, bj = ps.blocks_of(i), ps.blocks_of(j)
    Ci = {k: sets[k][bi[k - 1]] for k in (1, 2, 3)}
    Cj = {k: sets[k][bj[k - 1]] for k in (1, 2, 3)}
    P = path
    c10 = P & (Ci[1] | Cj[1])
    rest = P - c10
    return [
        rest - Ci[3] - Cj[3],
        (rest & Ci[3]) - Ci[2] - Cj[3],
        (rest & Ci[2]) - Ci[1] - Cj[3],
        (rest & Cj[3]) - Cj[2] - Ci[3],
        (rest & Ci[3] & Cj[3]) - Ci[2] - Cj[2],
        (rest & Ci[2] & Cj[3]) - Ci[1] - Cj[2],
        (rest & Cj[2]) - Cj[1] - Ci[3],
        (rest & Ci[3] & Cj[2]) - Ci[2] - Cj[1],
        (rest & Ci[2] & Cj[2]) - Ci[1] - Cj[1],
        c10,
    ]


class _T1InT3:
    """Index of the first level-1 block (within a level-3 block) holding each color."""

    level = 3

    def __init__(self, ps: PathStructure):
        self.ps = ps
        self.sizes = ps.t1_in_t3

    def fill(self, lut, top):
        ps = self.ps
        B = int(ps.block_of[3][top])
        touched = []
        for r in range(len(ps.t1_in_t3[B]) - 1, -1, -1):
            cols = ps.cbi.block_colors[1][ps.t1_in_t3[B][r]]
            lut[cols] = r
            touched.extend(cols)
        return touched


class _T1InT2:
    """Index of the first level-1 block (within a level-2 block) holding each color."""

    level = 2

    def __init__(self, ps: PathStructure):
        self.ps = ps
        self.sizes = ps.h.sub_blocks[1]

    def fill(self, lut, top):
        ps = self.ps
        B = int(ps.block_of[2][top])
        subs = ps.h.sub_blocks[1][B]
        touched = []
        for r in range(len(subs) - 1, -1, -1):
            cols = ps.cbi.block_colors[1][subs[r]]
            lut[cols] = r
            touched.extend(cols)
        return touched


# -- convenience wrappers -----------------------------------------------------


class PathQueries:
    """Mode, least-frequent and max-sum engines sharing one structure (built lazily)."""

    def __init__(self, tree: ColoredTree, t1: int | None = None, mode: str = STRATIFIED,
                 word_size: int = 64, prefer_compiled: bool = True):
        self.ps = PathStructure(tree, t1=t1, word_size=word_size)
        self.mode = mode
        self.prefer_compiled = prefer_compiled
        self._engines = {}

    def engine(self, kind: str) -> Engine:
        eng = self._engines.get(kind)
        if eng is None:
            vf = self.ps.vf
            if kind == "mode":
                g = make_mode_g(vf)
            elif kind == "lfe":
                g = make_lfe_g(vf)
            elif kind == "sum":
                g = make_sum_g(vf, self.ps.tree)
            else:
                raise ValueError(f"unknown query kind {kind!r}")
            eng = Engine(self.ps, g, mode=self.mode, prefer_compiled=self.prefer_compiled)
            self._engines[kind] = eng
        return eng

    def mode_query(self, i, j) -> QueryResult:
        return query_mode(self.engine("mode"), i, j)

    def least_frequent(self, i, j) -> QueryResult:
        return query_least_frequent(self.engine("lfe"), i, j)

    def max_sum(self, i, j) -> QueryResult:
        return self.engine("sum").query_max_gvalue(i, j)


def query_max_gvalue(engine: Engine, i: int, j: int) -> QueryResult:
    return engine.query_max_gvalue(i, j)


def query_mode(engine: Engine, i: int, j: int) -> QueryResult:
    return engine.query_max_gvalue(i, j)


def query_least_frequent(engine: Engine, i: int, j: int) -> QueryResult:
    return engine.query_max_gvalue(i, j)
