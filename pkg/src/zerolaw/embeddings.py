"""Counting, enumerating and packing extensions of a partial embedding.

An extension query fixes f0: A -> M, where A is a set of vertices of B, and
asks for embeddings f: B -> M that agree with f0 on A.  The backtracking
search itself lives in ``kernels``.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from . import kernels
from .structures import PartialEmbedding, Structure, is_embedding, restrict

COUNT_CAP = (1 << 63) - 1
EXACT_FAMILY_BOUND = 20


class ExtensionCount(int):
    """An ``int`` that remembers whether the search stopped at its limit."""

    truncated: bool

    def __new__(cls, value, truncated=False):
        obj = super().__new__(cls, value)
        obj.truncated = truncated
        return obj


class ExtensionList(list):
    truncated = False


@dataclass(frozen=True)
class ExtensionQuery:
    """Extensions of ``f0`` (B-vertex -> M-vertex, domain = A) to all of B."""

    M: Structure
    f0: PartialEmbedding
    B: Structure
    limit: int | None = None

    def __post_init__(self):
        f0 = PartialEmbedding.of(self.f0)
        object.__setattr__(self, "f0", f0)
        if self.limit is not None and self.limit < 0:
            raise ValueError("limit must be non-negative")
        dom = sorted(f0.domain)
        if any(not (1 <= a <= self.B.n) for a in dom):
            raise ValueError("domain of f0 must be vertices of B")
        if self.B.has_successor and not self.M.has_successor:
            raise ValueError("B uses S but M has no successor relation")
        A, labels = restrict(self.B, dom)
        m = f0.mapping
        if not is_embedding({i + 1: m[v] for i, v in enumerate(labels)}, A, self.M):
            raise ValueError("f0 is not an embedding of A into M")

    @property
    def A(self):
        return self.f0.domain


def _plan(q):
    """Pattern matrices, fixed image, search order and anchors."""
    B, M = q.B, q.M
    k = B.n
    pat_adj = B.dense() if k else np.zeros((0, 0), dtype=np.uint8)
    if M.has_successor:
        pat_succ = B.dense_succ() if B.has_successor else np.zeros((k, k), dtype=np.uint8)
    else:
        pat_succ = np.zeros((k, k), dtype=np.uint8)
    image = [-1] * k
    for a, v in q.f0.pairs:
        image[a - 1] = v - 1
    placed = [a - 1 for a, _ in q.f0.pairs]
    free = [v for v in range(k) if image[v] < 0]
    order, anchors, kinds = [], [], []
    while free:
        # fail first: successor links pin a vertex, E links to placed vertices narrow it
        def score(p):
            s_links = sum(1 for u in placed if pat_succ[u, p] or pat_succ[p, u])
            e_links = sum(1 for u in placed if pat_adj[u, p])
            return (s_links, e_links, -p)

        p = max(free, key=score)
        kind, anchor = kernels.ANCHOR_NONE, -1
        for u in placed:
            if pat_succ[u, p]:
                kind, anchor = kernels.ANCHOR_S_OUT, u
                break
            if pat_succ[p, u]:
                kind, anchor = kernels.ANCHOR_S_IN, u
                break
        if kind == kernels.ANCHOR_NONE:
            nbrs = [u for u in placed if pat_adj[u, p]]
            fixed = [u for u in nbrs if image[u] >= 0]
            if fixed:
                anchor = min(fixed, key=lambda u: M.degree(image[u] + 1))
                kind = kernels.ANCHOR_E
            elif nbrs:
                anchor, kind = nbrs[0], kernels.ANCHOR_E
        order.append(p)
        anchors.append(anchor)
        kinds.append(kind)
        placed.append(p)
        free.remove(p)
    return pat_adj, pat_succ, image, order, anchors, kinds


def _run(q, mode, limit, backend=None):
    pat_adj, pat_succ, image, order, anchors, kinds = _plan(q)
    return kernels.search(q.M, pat_adj, pat_succ, image, order, anchors, kinds, mode,
                          limit, backend=backend)


def _to_map(img):
    return PartialEmbedding(tuple((i + 1, v + 1) for i, v in enumerate(img)))


def _cap(limit):
    return COUNT_CAP - 1 if limit is None else min(limit, COUNT_CAP - 1)


def count_extensions(q, backend=None):
    """Number of extensions; ``truncated`` is set when the count reached the limit
    and more extensions exist."""
    lim = _cap(q.limit)
    count, _ = _run(q, kernels.MODE_COUNT, lim + 1, backend)
    if count > lim:
        return ExtensionCount(lim, True)
    return ExtensionCount(count, False)


def enumerate_extensions(q, backend=None):
    lim = _cap(q.limit)
    _, maps = _run(q, kernels.MODE_ENUM, lim + 1, backend)
    out = ExtensionList(_to_map(m) for m in maps[:lim])
    out.truncated = len(maps) > lim
    return out


def max_disjoint_family(q, strategy="greedy", backend=None):
    """Extensions whose ranges pairwise meet exactly in Rang(f0).

    ``greedy`` scans candidates in ascending vertex order and returns a maximal
    family; ``exact`` returns a maximum one but needs at most 20 extensions.
    """
    if strategy == "greedy":
        _, maps = _run(q, kernels.MODE_GREEDY, COUNT_CAP, backend)
        return [_to_map(m) for m in maps]
    if strategy != "exact":
        raise ValueError(f"unknown strategy {strategy!r}")
    exts = enumerate_extensions(ExtensionQuery(q.M, q.f0, q.B, EXACT_FAMILY_BOUND), backend)
    if exts.truncated:
        raise ValueError(f"exact packing needs at most {EXACT_FAMILY_BOUND} extensions")
    base = q.f0.range
    news = [e.range - base for e in exts]
    best = []

    def grow(start, chosen, used):
        nonlocal best
        if len(chosen) > len(best):
            best = list(chosen)
        if len(chosen) + len(exts) - start <= len(best):
            return
        for i in range(start, len(exts)):
            if not (news[i] & used):
                chosen.append(i)
                grow(i + 1, chosen, used | news[i])
                chosen.pop()

    grow(0, [], frozenset())
    return [exts[i] for i in best]


def are_disjoint_over(family, f0):
    """Pairwise Rang(f') ∩ Rang(f'') = Rang(f0)."""
    base = PartialEmbedding.of(f0).range
    return all(f.range & g.range == base for f, g in combinations(family, 2))


def count_embeddings(H, M, limit=None, backend=None):
    return count_extensions(ExtensionQuery(M, PartialEmbedding(()), H, limit), backend)


def enumerate_embeddings(H, M, limit=None, backend=None):
    return enumerate_extensions(ExtensionQuery(M, PartialEmbedding(()), H, limit), backend)


def brute_force_extensions(q):
    """Reference enumeration by trying every injective assignment."""
    from itertools import permutations

    m = q.f0.mapping
    free = [v for v in q.B.vertices if v not in m]
    avail = [v for v in q.M.vertices if v not in set(m.values())]
    out = []
    for choice in permutations(avail, len(free)):
        f = dict(m)
        f.update(zip(free, choice))
        if is_embedding(f, q.B, q.M):
            out.append(PartialEmbedding.of(f))
    return sorted(out, key=lambda e: e.pairs)
