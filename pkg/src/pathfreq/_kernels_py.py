"""Pure-Python table sweeps (reference implementation and fallback).

A sweep walks the whole tree from one start node, keeping for every color
its score on the path from the start to the current node.  Each time the
walk enters a new *target* block it records the best-scoring color among a
candidate set, skipping colors that occur in the target block.

Scores are additive per-node values by default.  Passing ``evaluate`` switches
to endpoint tracking: the score of color ``c`` is ``evaluate(first, last)``
with ``first``/``last`` its occurrences nearest the start and the current node.
"""

from __future__ import annotations

import numpy as np

NEG = -(1 << 62)


def _better(v, c, bv, bc):
    return v > bv or (v == bv and c < bc)


class Sweeper:
    def __init__(self, adj_ptr, adj, color, value, ncolors, evaluate=None):
        self.adj_ptr = np.asarray(adj_ptr).tolist()
        self.adj = np.asarray(adj).tolist()
        self.color = np.asarray(color).tolist()
        self.value = np.asarray(value).tolist() if value is not None else None
        self.ncolors = int(ncolors)
        self.evaluate = evaluate
        self.ops = 0

    # DFS driver: calls enter(y, p) / leave(y) in walk order
    def _walk(self, start, enter, leave):
        adj_ptr, adj = self.adj_ptr, self.adj
        enter(start, 0)
        stack = [(start, 0, adj_ptr[start])]
        while stack:
            x, p, e = stack[-1]
            if e < adj_ptr[x + 1]:
                stack[-1] = (x, p, e + 1)
                y = adj[e]
                if y == p:
                    continue
                enter(y, x)
                stack.append((y, x, adj_ptr[y]))
            else:
                leave(x)
                stack.pop()

    def _scorer(self):
        """Returns (add, remove, score) closures over fresh per-color state."""
        color, value, evaluate = self.color, self.value, self.evaluate
        cnt = [0] * (self.ncolors + 1)
        if evaluate is None:
            acc = [0] * (self.ncolors + 1)

            def add(y):
                c = color[y]
                cnt[c] += 1
                acc[c] += value[y]

            def remove(y):
                c = color[y]
                cnt[c] -= 1
                acc[c] -= value[y]

            def score(c):
                return acc[c]
        else:
            occ = [[] for _ in range(self.ncolors + 1)]

            def add(y):
                c = color[y]
                cnt[c] += 1
                occ[c].append(y)

            def remove(y):
                c = color[y]
                cnt[c] -= 1
                occ[c].pop()

            def score(c):
                o = occ[c]
                return evaluate(o[0], o[-1])
        return cnt, add, remove, score

    def best_row(self, start, univ, target_of, ntargets, excl_ptr, excl,
                 grp_of=None, grp_ptr=None, grp_col=None):
        """Best candidate color per target block; returns (colors, scores) arrays (0 = none)."""
        target_of = np.asarray(target_of).tolist()
        excl_ptr = np.asarray(excl_ptr).tolist()
        excl = np.asarray(excl).tolist()
        out_c = [0] * ntargets
        out_v = [NEG] * ntargets
        cnt, add, remove, score = self._scorer()
        in_univ = set(int(c) for c in univ)
        univ_list = sorted(in_univ)
        grouped = grp_of is not None
        if grouped:
            grp_of = np.asarray(grp_of).tolist()
            grp_ptr = np.asarray(grp_ptr).tolist()
            grp_col = np.asarray(grp_col).tolist()
        wstack = []
        entry_flags = {}
        ops = 0

        def enter(y, p):
            nonlocal ops
            ops += 1
            add(y)
            if grouped and (p == 0 or grp_of[y] != grp_of[p]):
                g = grp_of[y]
                wstack.append([c for c in grp_col[grp_ptr[g]:grp_ptr[g + 1]] if c in in_univ])
                entry_flags[y] = True
                ops += grp_ptr[g + 1] - grp_ptr[g]
            if p == 0 or target_of[y] != target_of[p]:
                t = target_of[y]
                banned = set(excl[excl_ptr[t]:excl_ptr[t + 1]])
                cands = wstack[-1] if grouped else univ_list
                ops += len(banned) + len(cands)
                bc, bv = 0, NEG
                for c in cands:
                    if cnt[c] > 0 and c not in banned:
                        v = score(c)
                        if _better(v, c, bv, bc):
                            bc, bv = c, v
                out_c[t], out_v[t] = bc, bv

        def leave(y):
            remove(y)
            if grouped and entry_flags.pop(y, False):
                wstack.pop()

        self._walk(int(start), enter, leave)
        self.ops += ops
        return np.asarray(out_c, dtype=np.int64), np.asarray(out_v, dtype=np.int64)

    def segmax_row(self, start, banned, target_of, ntargets, excl_ptr, excl):
        """Best color on the path per target block, never using ``banned`` or the target's colors."""
        target_of = np.asarray(target_of).tolist()
        excl_ptr = np.asarray(excl_ptr).tolist()
        excl = np.asarray(excl).tolist()
        banned = set(int(c) for c in banned)
        size = 1
        while size < self.ncolors + 1:
            size *= 2
        tv = [NEG] * (2 * size)
        tc = [0] * (2 * size)
        for c in range(size):
            tc[size + c] = c
        cnt, add, remove, score = self._scorer()
        color = self.color
        out_c = [0] * ntargets
        out_v = [NEG] * ntargets
        ops = 0

        def put(c, v):
            x = size + c
            tv[x] = v
            x >>= 1
            while x:
                a, b = 2 * x, 2 * x + 1
                if tv[a] >= tv[b]:
                    tv[x], tc[x] = tv[a], tc[a]
                else:
                    tv[x], tc[x] = tv[b], tc[b]
                x >>= 1

        def refresh(c):
            if c not in banned:
                put(c, score(c) if cnt[c] > 0 else NEG)

        def enter(y, p):
            nonlocal ops
            ops += 1
            add(y)
            refresh(color[y])
            if p == 0 or target_of[y] != target_of[p]:
                t = target_of[y]
                cols = excl[excl_ptr[t]:excl_ptr[t + 1]]
                ops += 2 * len(cols)
                for c in cols:
                    if c not in banned:
                        put(c, NEG)
                if tv[1] > NEG:
                    out_c[t], out_v[t] = tc[1], tv[1]
                for c in cols:
                    refresh(c)

        def leave(y):
            remove(y)
            refresh(color[y])

        self._walk(int(start), enter, leave)
        self.ops += ops
        return np.asarray(out_c, dtype=np.int64), np.asarray(out_v, dtype=np.int64)
