"""Pure-Python/numpy implementations of the hot kernels.

These are the reference versions; ``_ckernels`` must reproduce them bit for bit.
Vertices are 0-based here.
"""
import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_INV53 = 1.0 / 9007199254740992.0

MODE_COUNT = 0
MODE_ENUM = 1
MODE_GREEDY = 2

ANCHOR_NONE = 0
ANCHOR_E = 1
ANCHOR_S_OUT = 2
ANCHOR_S_IN = 3


def mix64(z):
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def pair_uniform(key, i, j):
    """Uniform in [0, 1) attached to the unordered pair {i, j} (1-based labels)."""
    if i > j:
        i, j = j, i
    h = mix64(mix64((i << 32) | j) ^ key)
    return (h >> 11) * _INV53


def _mix64_np(z):
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def sample_adjacency(key, n, probs):
    """Dense symmetric 0/1 adjacency; pair {i,j} is an edge iff its uniform < probs[|i-j|]."""
    adj = np.zeros((n, n), dtype=np.uint8)
    if n < 2:
        return adj
    k = np.uint64(key)
    with np.errstate(over="ignore"):
        for d in range(1, n):
            p = probs[d]
            if p <= 0.0:
                continue
            i = np.arange(1, n - d + 1, dtype=np.uint64)
            w = (i << np.uint64(32)) | (i + np.uint64(d))
            h = _mix64_np(_mix64_np(w) ^ k)
            u = (h >> np.uint64(11)).astype(np.float64) * _INV53
            hit = np.nonzero(u < p)[0]
            adj[hit, hit + d] = 1
            adj[hit + d, hit] = 1
    return adj


def _iter_bits(mask):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def search(rows, succ_out, succ_in, n, pat_adj, pat_succ, image, order, anchors,
           anchor_kinds, mode, limit):
    """Backtracking search for embeddings extending a fixed partial image.

    ``rows``/``succ_out``/``succ_in`` are bitmask rows of the target (the
    successor rows are ``None`` when the target has no S relation).  ``image``
    holds the fixed part (-1 for free pattern vertices) and ``order`` lists the
    free pattern vertices in search order; ``anchors[pos]`` names an already
    placed pattern vertex whose E- or S-row bounds the candidates at ``pos``.

    Stops once ``limit`` embeddings are found.  Returns ``(count, maps)``; maps
    are collected in the enumerate and greedy modes only.  In greedy mode each
    accepted map blocks its new vertices, which yields a maximal family of
    extensions that are pairwise disjoint off the fixed part.
    """
    k = len(pat_adj)
    img = list(image)
    full = (1 << n) - 1
    used = 0
    for v in img:
        if v >= 0:
            used |= 1 << v
    blocked = 0
    found = []
    count = 0
    last = len(order) - 1
    if limit <= 0:
        return 0, found
    if last < 0:
        if mode != MODE_COUNT:
            found.append(tuple(img))
        return 1, found

    def candidates(pos):
        p = order[pos]
        kind = anchor_kinds[pos]
        if kind == ANCHOR_E:
            mask = rows[img[anchors[pos]]]
        elif kind == ANCHOR_S_OUT:
            mask = succ_out[img[anchors[pos]]]
        elif kind == ANCHOR_S_IN:
            mask = succ_in[img[anchors[pos]]]
        else:
            mask = full
        mask &= ~(used | blocked)
        for q in range(k):
            w = img[q]
            if w < 0:
                continue
            mask = mask & rows[w] if pat_adj[q][p] else mask & ~rows[w]
            if succ_out is not None:
                mask = mask & succ_out[w] if pat_succ[q][p] else mask & ~succ_out[w]
                mask = mask & succ_in[w] if pat_succ[p][q] else mask & ~succ_in[w]
        return mask & full

    def rec(pos):
        # 0: carry on, 1: unwind to the top level (greedy hit), 2: halt (limit)
        nonlocal used, blocked, count
        p = order[pos]
        mask = candidates(pos)
        if pos == last and mode == MODE_COUNT:
            c = mask.bit_count()
            if count + c >= limit:
                count = limit
                return 2
            count += c
            return 0
        for v in _iter_bits(mask):
            if (blocked >> v) & 1:
                continue
            img[p] = v
            used |= 1 << v
            if pos == last:
                count += 1
                found.append(tuple(img))
                r = 0
                if mode == MODE_GREEDY:
                    for q in order:
                        blocked |= 1 << img[q]
                    r = 1
                if count >= limit:
                    r = 2
            else:
                r = rec(pos + 1)
            img[p] = -1
            used &= ~(1 << v)
            if r == 2:
                return 2
            if r == 1 and pos > 0:
                return 1
        return 0

    rec(0)
    return count, found
