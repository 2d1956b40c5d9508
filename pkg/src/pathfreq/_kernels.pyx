# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled table sweeps; same interface as the pure-Python ``Sweeper`` for additive scores."""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t

cnp.import_array()

cdef int64_t NEG = -(1 << 62)


cdef inline bint better(int64_t v, int64_t c, int64_t bv, int64_t bc) nogil:
    return v > bv or (v == bv and c < bc)


def _i64(a):
    return np.ascontiguousarray(a, dtype=np.int64)


cdef class Sweeper:
    cdef int64_t[::1] adj_ptr, adj, color, value
    cdef int64_t[::1] cnt, acc, umark, xmark
    cdef int64_t[::1] st_node, st_par, st_edge, w_lo, w_hi, wbuf
    cdef int64_t[::1] tv, tc, bmark
    cdef int64_t n, ncolors, size, stamp
    cdef public int64_t ops

    def __init__(self, adj_ptr, adj, color, value, ncolors, evaluate=None):
        if evaluate is not None:
            raise TypeError("compiled sweeps only support additive scores")
        self.adj_ptr = _i64(adj_ptr)
        self.adj = _i64(adj)
        self.color = _i64(color)
        self.value = _i64(value)
        self.n = len(color) - 1
        self.ncolors = ncolors
        k = ncolors + 1
        self.cnt = np.zeros(k, dtype=np.int64)
        self.acc = np.zeros(k, dtype=np.int64)
        self.umark = np.zeros(k, dtype=np.int64)
        self.xmark = np.zeros(k, dtype=np.int64)
        self.bmark = np.zeros(k, dtype=np.int64)
        m = self.n + 2
        self.st_node = np.zeros(m, dtype=np.int64)
        self.st_par = np.zeros(m, dtype=np.int64)
        self.st_edge = np.zeros(m, dtype=np.int64)
        self.w_lo = np.zeros(m, dtype=np.int64)
        self.w_hi = np.zeros(m, dtype=np.int64)
        self.wbuf = np.zeros(m + k, dtype=np.int64)
        size = 1
        while size < k:
            size *= 2
        self.size = size
        self.tv = np.full(2 * size, NEG, dtype=np.int64)
        self.tc = np.zeros(2 * size, dtype=np.int64)
        for c in range(size):
            self.tc[size + c] = c
        for x in range(size - 1, 0, -1):
            self.tc[x] = self.tc[2 * x]
        self.stamp = 0
        self.ops = 0

    def best_row(self, int64_t start, univ, target_of, int64_t ntargets, excl_ptr, excl,
                 grp_of=None, grp_ptr=None, grp_col=None):
        cdef int64_t[::1] u = _i64(univ)
        cdef int64_t[::1] tgt = _i64(target_of)
        cdef int64_t[::1] xp = _i64(excl_ptr)
        cdef int64_t[::1] xs = _i64(excl)
        cdef bint grouped = grp_of is not None
        cdef int64_t[::1] gof, gp, gc
        if grouped:
            gof, gp, gc = _i64(grp_of), _i64(grp_ptr), _i64(grp_col)
        else:
            gof = gp = gc = np.zeros(1, dtype=np.int64)
        out_c_arr = np.zeros(ntargets, dtype=np.int64)
        out_v_arr = np.full(ntargets, NEG, dtype=np.int64)
        cdef int64_t[::1] out_c = out_c_arr
        cdef int64_t[::1] out_v = out_v_arr
        self._best_row(start, u, tgt, xp, xs, grouped, gof, gp, gc, out_c, out_v)
        return out_c_arr, out_v_arr

    cdef void _best_row(self, int64_t start, int64_t[::1] u, int64_t[::1] tgt,
                        int64_t[::1] xp, int64_t[::1] xs, bint grouped,
                        int64_t[::1] gof, int64_t[::1] gp, int64_t[::1] gc,
                        int64_t[::1] out_c, int64_t[::1] out_v) noexcept nogil:
        cdef int64_t k, c, sp, x, y, p, e, t, g, bc, bv, v, wend, ustamp, xstamp
        cdef int64_t lo, hi
        cdef int64_t ops = 0
        self.stamp += 1
        ustamp = self.stamp
        for k in range(u.shape[0]):
            self.umark[u[k]] = ustamp
        wend = 0
        sp = 0
        y = start
        p = 0
        while True:
            # enter y from p at stack depth sp
            ops += 1
            c = self.color[y]
            self.cnt[c] += 1
            self.acc[c] += self.value[y]
            self.st_node[sp] = y
            self.st_par[sp] = p
            self.st_edge[sp] = self.adj_ptr[y]
            if grouped:
                if p == 0 or gof[y] != gof[p]:
                    g = gof[y]
                    self.w_lo[sp] = wend
                    for k in range(gp[g], gp[g + 1]):
                        if self.umark[gc[k]] == ustamp:
                            self.wbuf[wend] = gc[k]
                            wend += 1
                    ops += gp[g + 1] - gp[g]
                    self.w_hi[sp] = wend
                else:
                    self.w_lo[sp] = self.w_lo[sp - 1]
                    self.w_hi[sp] = self.w_hi[sp - 1]
            if p == 0 or tgt[y] != tgt[p]:
                t = tgt[y]
                self.stamp += 1
                xstamp = self.stamp
                for k in range(xp[t], xp[t + 1]):
                    self.xmark[xs[k]] = xstamp
                bc = 0
                bv = NEG
                if grouped:
                    lo = self.w_lo[sp]
                    hi = self.w_hi[sp]
                    for k in range(lo, hi):
                        c = self.wbuf[k]
                        if self.cnt[c] > 0 and self.xmark[c] != xstamp:
                            v = self.acc[c]
                            if better(v, c, bv, bc):
                                bc = c
                                bv = v
                    ops += hi - lo
                else:
                    for k in range(u.shape[0]):
                        c = u[k]
                        if self.cnt[c] > 0 and self.xmark[c] != xstamp:
                            v = self.acc[c]
                            if better(v, c, bv, bc):
                                bc = c
                                bv = v
                    ops += u.shape[0]
                ops += xp[t + 1] - xp[t]
                out_c[t] = bc
                out_v[t] = bv
            # advance to the next unvisited neighbor, unwinding finished nodes
            while True:
                x = self.st_node[sp]
                e = self.st_edge[sp]
                if e < self.adj_ptr[x + 1]:
                    self.st_edge[sp] = e + 1
                    y = self.adj[e]
                    if y == self.st_par[sp]:
                        continue
                    p = x
                    sp += 1
                    break
                c = self.color[x]
                self.cnt[c] -= 1
                self.acc[c] -= self.value[x]
                if grouped and (sp == 0 or self.w_lo[sp] != self.w_lo[sp - 1] or
                                self.w_hi[sp] != self.w_hi[sp - 1]):
                    wend = self.w_lo[sp]
                if sp == 0:
                    sp = -1
                    break
                sp -= 1
            if sp < 0:
                break
        self.ops += ops

    cdef inline void _put(self, int64_t c, int64_t v) noexcept nogil:
        cdef int64_t x = self.size + c
        cdef int64_t a, b
        self.tv[x] = v
        x >>= 1
        while x:
            a = 2 * x
            b = a + 1
            if self.tv[a] >= self.tv[b]:
                self.tv[x] = self.tv[a]
                self.tc[x] = self.tc[a]
            else:
                self.tv[x] = self.tv[b]
                self.tc[x] = self.tc[b]
            x >>= 1

    cdef inline void _refresh(self, int64_t c, int64_t bstamp) noexcept nogil:
        if self.bmark[c] != bstamp:
            if self.cnt[c] > 0:
                self._put(c, self.acc[c])
            else:
                self._put(c, NEG)

    def segmax_row(self, int64_t start, banned, target_of, int64_t ntargets, excl_ptr, excl):
        cdef int64_t[::1] bn = _i64(banned)
        cdef int64_t[::1] tgt = _i64(target_of)
        cdef int64_t[::1] xp = _i64(excl_ptr)
        cdef int64_t[::1] xs = _i64(excl)
        out_c_arr = np.zeros(ntargets, dtype=np.int64)
        out_v_arr = np.full(ntargets, NEG, dtype=np.int64)
        cdef int64_t[::1] out_c = out_c_arr
        cdef int64_t[::1] out_v = out_v_arr
        self._segmax_row(start, bn, tgt, xp, xs, out_c, out_v)
        return out_c_arr, out_v_arr

    cdef void _segmax_row(self, int64_t start, int64_t[::1] bn, int64_t[::1] tgt,
                          int64_t[::1] xp, int64_t[::1] xs,
                          int64_t[::1] out_c, int64_t[::1] out_v) noexcept nogil:
        cdef int64_t k, c, sp, x, y, p, e, t, bstamp
        cdef int64_t ops = 0
        self.stamp += 1
        bstamp = self.stamp
        for k in range(bn.shape[0]):
            self.bmark[bn[k]] = bstamp
        sp = 0
        y = start
        p = 0
        while True:
            ops += 1
            c = self.color[y]
            self.cnt[c] += 1
            self.acc[c] += self.value[y]
            self._refresh(c, bstamp)
            self.st_node[sp] = y
            self.st_par[sp] = p
            self.st_edge[sp] = self.adj_ptr[y]
            if p == 0 or tgt[y] != tgt[p]:
                t = tgt[y]
                for k in range(xp[t], xp[t + 1]):
                    if self.bmark[xs[k]] != bstamp:
                        self._put(xs[k], NEG)
                if self.tv[1] > NEG:
                    out_c[t] = self.tc[1]
                    out_v[t] = self.tv[1]
                for k in range(xp[t], xp[t + 1]):
                    self._refresh(xs[k], bstamp)
                ops += 2 * (xp[t + 1] - xp[t])
            while True:
                x = self.st_node[sp]
                e = self.st_edge[sp]
                if e < self.adj_ptr[x + 1]:
                    self.st_edge[sp] = e + 1
                    y = self.adj[e]
                    if y == self.st_par[sp]:
                        continue
                    p = x
                    sp += 1
                    break
                c = self.color[x]
                self.cnt[c] -= 1
                self.acc[c] -= self.value[x]
                self._refresh(c, bstamp)
                if sp == 0:
                    sp = -1
                    break
                sp -= 1
            if sp < 0:
                break
        self.ops += ops
