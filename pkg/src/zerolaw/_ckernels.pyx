# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: counter-based edge sampling and embedding search.

Semantics are identical to ``_pykernels``; the search scans dense rows instead
of intersecting bitmasks but visits candidates in the same ascending order.
"""
import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t, int64_t, uint8_t

cnp.import_array()

cdef enum:
    MODE_COUNT = 0
    MODE_ENUM = 1
    MODE_GREEDY = 2
    ANCHOR_NONE = 0
    ANCHOR_E = 1
    ANCHOR_S_OUT = 2
    ANCHOR_S_IN = 3

cdef double INV53 = 1.0 / 9007199254740992.0


cdef inline uint64_t mix64(uint64_t z) nogil:
    z = (z ^ (z >> 30)) * <uint64_t>0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * <uint64_t>0x94D049BB133111EBULL
    return z ^ (z >> 31)


def pair_uniform(uint64_t key, uint64_t i, uint64_t j):
    if i > j:
        i, j = j, i
    cdef uint64_t h = mix64(mix64((i << 32) | j) ^ key)
    return (h >> 11) * INV53


def sample_adjacency(uint64_t key, Py_ssize_t n, double[::1] probs):
    cdef cnp.ndarray[cnp.uint8_t, ndim=2] out = np.zeros((n, n), dtype=np.uint8)
    cdef uint8_t[:, ::1] adj = out
    cdef Py_ssize_t d, i
    cdef double p
    cdef uint64_t h, a, b
    with nogil:
        for d in range(1, n):
            p = probs[d]
            if p <= 0.0:
                continue
            for i in range(0, n - d):
                a = <uint64_t>(i + 1)
                b = <uint64_t>(i + 1 + d)
                h = mix64(mix64((a << 32) | b) ^ key)
                if (h >> 11) * INV53 < p:
                    adj[i, i + d] = 1
                    adj[i + d, i] = 1
    return out


cdef class _Search:
    cdef uint8_t[:, ::1] adj
    cdef uint8_t[:, ::1] succ
    cdef bint has_succ
    cdef Py_ssize_t n, k, depth
    cdef int64_t[::1] img
    cdef int64_t[::1] order
    cdef int64_t[::1] anchors
    cdef int64_t[::1] kinds
    cdef uint8_t[:, ::1] pat_adj
    cdef uint8_t[:, ::1] pat_succ
    cdef uint8_t[::1] used
    cdef uint8_t[::1] blocked
    cdef int mode
    cdef int64_t limit
    cdef int64_t count
    cdef list found

    cdef bint ok(self, Py_ssize_t p, Py_ssize_t v):
        cdef Py_ssize_t q
        cdef int64_t w
        if self.used[v] or self.blocked[v]:
            return False
        for q in range(self.k):
            w = self.img[q]
            if w < 0:
                continue
            if self.adj[w, v] != self.pat_adj[q, p]:
                return False
            if self.has_succ:
                if self.succ[w, v] != self.pat_succ[q, p]:
                    return False
                if self.succ[v, w] != self.pat_succ[p, q]:
                    return False
        return True

    cdef int rec(self, Py_ssize_t pos):
        cdef Py_ssize_t p = self.order[pos]
        cdef int kind = self.kinds[pos]
        cdef int64_t a = -1
        cdef Py_ssize_t v, q
        cdef bint last = pos == self.depth - 1
        cdef int r
        if kind != ANCHOR_NONE:
            a = self.img[self.anchors[pos]]
        for v in range(self.n):
            if kind == ANCHOR_E:
                if not self.adj[a, v]:
                    continue
            elif kind == ANCHOR_S_OUT:
                if not self.succ[a, v]:
                    continue
            elif kind == ANCHOR_S_IN:
                if not self.succ[v, a]:
                    continue
            if not self.ok(p, v):
                continue
            if last and self.mode == MODE_COUNT:
                self.count += 1
                if self.count >= self.limit:
                    return 2
                continue
            self.img[p] = v
            self.used[v] = 1
            if last:
                self.count += 1
                self.found.append(tuple(self.img))
                r = 0
                if self.mode == MODE_GREEDY:
                    for q in range(self.depth):
                        self.blocked[self.img[self.order[q]]] = 1
                    r = 1
                if self.count >= self.limit:
                    r = 2
            else:
                r = self.rec(pos + 1)
            self.img[p] = -1
            self.used[v] = 0
            if r == 2:
                return 2
            if r == 1 and pos > 0:
                return 1
        return 0


def search(adj, succ, Py_ssize_t n, pat_adj, pat_succ, image, order, anchors,
           anchor_kinds, int mode, int64_t limit):
    cdef _Search s = _Search()
    cdef Py_ssize_t v
    s.adj = adj
    s.has_succ = succ is not None
    s.succ = succ if succ is not None else np.zeros((1, 1), dtype=np.uint8)
    s.n = n
    s.pat_adj = np.ascontiguousarray(pat_adj, dtype=np.uint8)
    s.pat_succ = np.ascontiguousarray(pat_succ, dtype=np.uint8)
    s.k = s.pat_adj.shape[0]
    s.img = np.array(image, dtype=np.int64)
    s.order = np.array(order, dtype=np.int64)
    s.anchors = np.array(anchors, dtype=np.int64)
    s.kinds = np.array(anchor_kinds, dtype=np.int64)
    s.depth = len(order)
    s.used = np.zeros(max(n, 1), dtype=np.uint8)
    s.blocked = np.zeros(max(n, 1), dtype=np.uint8)
    s.mode = mode
    s.limit = limit
    s.count = 0
    s.found = []
    if limit <= 0:
        return 0, []
    for v in range(s.k):
        if s.img[v] >= 0:
            s.used[s.img[v]] = 1
    if s.depth == 0:
        if mode != MODE_COUNT:
            s.found.append(tuple(s.img))
        return 1, s.found
    s.rec(0)
    return s.count, s.found
