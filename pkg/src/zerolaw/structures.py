"""Finite structures on [n] for the graph vocabulary {E} or {E, S}.

Vertices are 1-based in every public function.  Internally each structure keeps
its relations as bitmask rows: bit ``u - 1`` of ``rows[v - 1]`` is set iff
E(v, u).  The successor relation S, when present, is stored explicitly as
out-rows because induced substructures of a model with successor only carry
the induced part of S.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from itertools import combinations, product
from typing import NamedTuple

import numpy as np

from .errors import UnsupportedSize

CANON_BOUND = 10
ENUM_BOUND = 6


@dataclass(frozen=True)
class Symbol:
    name: str
    arity: int
    symmetric: bool = False
    irreflexive: bool = False


EDGE = Symbol("E", 2, symmetric=True, irreflexive=True)
SUCC = Symbol("S", 2, symmetric=False, irreflexive=True)


@dataclass(frozen=True)
class Vocabulary:
    symbols: tuple = (EDGE,)
    successor: bool = False

    def __post_init__(self):
        names = [s.name for s in self.symbols]
        if len(set(names)) != len(names):
            raise ValueError("duplicate symbol names")
        if any(s.arity < 1 for s in self.symbols):
            raise ValueError("arities must be >= 1")
        expected = (EDGE, SUCC) if self.successor else (EDGE,)
        if tuple(self.symbols) != expected:
            raise ValueError("only the graph vocabulary {E} or {E, S} is supported")

    @classmethod
    def graph(cls, successor=False):
        return cls((EDGE, SUCC) if successor else (EDGE,), successor)

    def arity(self, name):
        for s in self.symbols:
            if s.name == name:
                return s.arity
        raise KeyError(name)


GRAPH = Vocabulary.graph()
GRAPH_S = Vocabulary.graph(successor=True)


def _bits(mask):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True, eq=False)
class Structure:
    """An immutable finite structure with universe {1, ..., n}.

    ``succ`` is ``None`` for pure graphs.  ``positions`` records where each
    vertex sat in the structure it was restricted from; it is metadata and does
    not take part in equality.
    """

    n: int
    rows: tuple
    succ: tuple | None = None
    positions: tuple = field(default=None)

    def __post_init__(self):
        if len(self.rows) != self.n:
            raise ValueError("rows must have length n")
        if self.succ is not None and len(self.succ) != self.n:
            raise ValueError("succ rows must have length n")
        if self.positions is None:
            object.__setattr__(self, "positions", tuple(range(1, self.n + 1)))

    # construction -------------------------------------------------------

    @classmethod
    def from_edges(cls, n, edges=(), successor=False):
        """Build from 1-based edges.  ``successor`` is ``False``, ``True`` (full
        successor on [n]) or an explicit iterable of S-pairs."""
        rows = [0] * n
        for i, j in edges:
            _check_vertex(n, i)
            _check_vertex(n, j)
            if i == j:
                raise ValueError(f"loop at {i}: E is irreflexive")
            rows[i - 1] |= 1 << (j - 1)
            rows[j - 1] |= 1 << (i - 1)
        return cls(n, tuple(rows), _succ_rows(n, successor))

    @classmethod
    def from_dense(cls, adj, successor=False):
        adj = np.asarray(adj, dtype=np.uint8)
        n = adj.shape[0]
        if n == 0:
            s = cls(0, (), _succ_rows(0, successor))
        else:
            packed = np.packbits(adj, axis=1, bitorder="little")
            rows = tuple(int.from_bytes(r.tobytes(), "little") for r in packed)
            s = cls(n, rows, _succ_rows(n, successor))
        s.__dict__["_dense"] = adj
        return s

    @classmethod
    def empty(cls, n=0, successor=False):
        return cls(n, (0,) * n, _succ_rows(n, successor))

    @classmethod
    def complete(cls, n):
        return cls.from_edges(n, combinations(range(1, n + 1), 2))

    @classmethod
    def path(cls, n):
        return cls.from_edges(n, [(i, i + 1) for i in range(1, n)])

    @classmethod
    def cycle(cls, n):
        edges = [(i, i + 1) for i in range(1, n)] + ([(1, n)] if n > 2 else [])
        return cls.from_edges(n, edges)

    @classmethod
    def star(cls, leaves):
        return cls.from_edges(leaves + 1, [(1, j) for j in range(2, leaves + 2)])

    @classmethod
    def named(cls, name):
        """``K3``, ``P4``, ``C5``, ``E2`` (edgeless) or ``Star3`` (K_{1,3})."""
        for prefix, make in (("Star", cls.star), ("K", cls.complete), ("P", cls.path),
                             ("C", cls.cycle), ("E", cls.empty)):
            if name.startswith(prefix) and name[len(prefix):].isdigit():
                return make(int(name[len(prefix):]))
        raise ValueError(f"unknown named structure {name!r}")

    # relations ----------------------------------------------------------

    @property
    def has_successor(self):
        return self.succ is not None

    @property
    def vocab(self):
        return GRAPH_S if self.has_successor else GRAPH

    @property
    def vertices(self):
        return range(1, self.n + 1)

    def adjacent(self, u, v):
        return bool((self.rows[u - 1] >> (v - 1)) & 1)

    def successor(self, u, v):
        return self.succ is not None and bool((self.succ[u - 1] >> (v - 1)) & 1)

    def neighbors(self, v):
        return [u + 1 for u in _bits(self.rows[v - 1])]

    def degree(self, v):
        return self.rows[v - 1].bit_count()

    def edges(self):
        """Sorted list of edges (i, j) with i < j."""
        out = []
        for i in range(self.n):
            for j in _bits(self.rows[i] >> (i + 1)):
                out.append((i + 1, i + j + 2))
        return out

    def edge_count(self):
        return sum(r.bit_count() for r in self.rows) // 2

    def succ_pairs(self):
        if self.succ is None:
            return []
        return [(i + 1, j + 1) for i in range(self.n) for j in _bits(self.succ[i])]

    @property
    def relations(self):
        """Each symbol's tuple set (E listed in both orientations)."""
        rel = {"E": frozenset((i + 1, j + 1) for i in range(self.n) for j in _bits(self.rows[i]))}
        if self.succ is not None:
            rel["S"] = frozenset(self.succ_pairs())
        return rel

    @property
    def succ_rows(self):
        return self.succ

    @cached_property
    def pred_rows(self):
        if self.succ is None:
            return None
        pred = [0] * self.n
        for i in range(self.n):
            for j in _bits(self.succ[i]):
                pred[j] |= 1 << i
        return tuple(pred)

    def dense(self):
        d = self.__dict__.get("_dense")
        if d is None:
            d = _dense_from_rows(self.rows, self.n)
            self.__dict__["_dense"] = d
        return d

    def dense_succ(self):
        d = self.__dict__.get("_dense_succ")
        if d is None:
            d = _dense_from_rows(self.succ, self.n)
            self.__dict__["_dense_succ"] = d
        return d

    def is_full_successor(self):
        return self.succ is not None and self.succ == _succ_rows(self.n, True)

    def check_invariants(self):
        """Raise ``AssertionError`` if symmetry, irreflexivity or range fails."""
        full = (1 << self.n) - 1
        for i, r in enumerate(self.rows):
            assert r & ~full == 0, "E tuple outside [1, n]"
            assert not (r >> i) & 1, "E must be irreflexive"
            for j in _bits(r):
                assert (self.rows[j] >> i) & 1, "E must be symmetric"
        if self.succ is not None:
            for i, r in enumerate(self.succ):
                assert r & ~full == 0, "S tuple outside [1, n]"
                assert not (r >> i) & 1, "S must be irreflexive"
        return True

    # equality / io --------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, Structure):
            return NotImplemented
        return self.n == other.n and self.rows == other.rows and self.succ == other.succ

    def __hash__(self):
        return hash((self.n, self.rows, self.succ))

    def __repr__(self):
        s = f", S={self.succ_pairs()}" if self.succ is not None else ""
        return f"Structure(n={self.n}, E={self.edges()}{s})"

    def to_json_obj(self):
        obj = {"n": self.n, "edges": [list(e) for e in self.edges()],
               "successor": self.has_successor}
        if self.has_successor and not self.is_full_successor():
            obj["s_pairs"] = [list(p) for p in self.succ_pairs()]
        return obj

    @classmethod
    def from_json_obj(cls, obj):
        succ = obj.get("successor", False)
        if succ and "s_pairs" in obj:
            succ = [tuple(p) for p in obj["s_pairs"]]
        edges = [tuple(e) for e in obj["edges"]]
        return cls.from_edges(int(obj["n"]), edges, successor=succ)

    def to_json(self):
        return json.dumps(self.to_json_obj(), sort_keys=True)

    @classmethod
    def from_json(cls, text):
        return cls.from_json_obj(json.loads(text))


def _check_vertex(n, v):
    if not (1 <= v <= n):
        raise ValueError(f"vertex {v} outside [1, {n}]")


def _succ_rows(n, successor):
    if successor is False or successor is None:
        return None
    rows = [0] * n
    if successor is True:
        for i in range(n - 1):
            rows[i] = 1 << (i + 1)
        return tuple(rows)
    for i, j in successor:
        _check_vertex(n, i)
        _check_vertex(n, j)
        if i == j:
            raise ValueError("S is irreflexive")
        rows[i - 1] |= 1 << (j - 1)
    return tuple(rows)


def _dense_from_rows(rows, n):
    if n == 0:
        return np.zeros((0, 0), dtype=np.uint8)
    nbytes = (n + 7) // 8
    buf = b"".join(r.to_bytes(nbytes, "little") for r in rows)
    packed = np.frombuffer(buf, dtype=np.uint8).reshape(n, nbytes)
    return np.ascontiguousarray(np.unpackbits(packed, axis=1, count=n, bitorder="little"))


def _submask(rows, keep):
    """Induced rows on the 0-based index list ``keep`` (relabelled 0..)."""
    out = []
    for v in keep:
        r = rows[v]
        m = 0
        for t, u in enumerate(keep):
            if (r >> u) & 1:
                m |= 1 << t
        out.append(m)
    return tuple(out)


class Restriction(NamedTuple):
    structure: Structure
    labels: tuple  # labels[i - 1] = vertex of the parent that became i


def restrict(M, X):
    """Induced substructure on X, relabelled 1..|X| in increasing order."""
    X = sorted(set(X))
    for v in X:
        if not (1 <= v <= M.n):
            raise ValueError(f"vertex {v} not in the structure")
    keep = [v - 1 for v in X]
    rows = _submask(M.rows, keep)
    succ = _submask(M.succ, keep) if M.succ is not None else None
    pos = tuple(M.positions[v] for v in keep)
    return Restriction(Structure(len(X), rows, succ, pos), tuple(X))


@dataclass(frozen=True)
class PartialEmbedding:
    """Injective partial map, stored as sorted (source, target) pairs."""

    pairs: tuple

    @classmethod
    def of(cls, mapping):
        if isinstance(mapping, PartialEmbedding):
            return mapping
        return cls(tuple(sorted(dict(mapping).items())))

    @property
    def mapping(self):
        return dict(self.pairs)

    @property
    def domain(self):
        return frozenset(a for a, _ in self.pairs)

    @property
    def range(self):
        return frozenset(b for _, b in self.pairs)

    def __len__(self):
        return len(self.pairs)


def is_embedding(f, A, M):
    """True iff ``f`` is injective and preserves and reflects E and S."""
    m = PartialEmbedding.of(f).mapping
    if set(m) != set(A.vertices):
        raise ValueError("domain of f must be the vertices of A")
    if len(set(m.values())) != len(m):
        return False
    if any(not (1 <= v <= M.n) for v in m.values()):
        return False
    if A.has_successor and not M.has_successor:
        return False
    for a in A.vertices:
        for b in A.vertices:
            if a == b:
                continue
            if A.adjacent(a, b) != M.adjacent(m[a], m[b]):
                return False
            if M.has_successor and A.successor(a, b) != M.successor(m[a], m[b]):
                return False
    return True


# canonical forms ----------------------------------------------------------


@dataclass(frozen=True, order=True)
class CanonicalForm:
    """Isomorphism invariant of (structure, parameter tuple[, marked block]).

    ``code`` = (n, #params, block size, has S, incidence bits); two inputs get
    equal codes iff an isomorphism maps parameters to parameters in order and
    the marked block onto the marked block.
    """

    code: tuple

    def __str__(self):
        n, p, a, s, bits = self.code
        return f"{n}:{p}:{a}:{int(s)}:{bits}"

    @classmethod
    def parse(cls, text):
        n, p, a, s, bits = text.split(":")
        return cls((int(n), int(p), int(a), bool(int(s)), bits))


def _refine(n, rows, succ, pred, init):
    """Colour refinement; returns canonical integer colours."""
    colors = list(init)
    while True:
        sigs = []
        for v in range(n):
            sig = (colors[v], tuple(sorted(colors[u] for u in _bits(rows[v]))))
            if succ is not None:
                sig += (tuple(sorted(colors[u] for u in _bits(succ[v]))),
                        tuple(sorted(colors[u] for u in _bits(pred[v]))))
            sigs.append(sig)
        ranks = {s: i for i, s in enumerate(sorted(set(sigs)))}
        new = [ranks[s] for s in sigs]
        if len(set(new)) == len(set(colors)):
            return new
        colors = new


def _canon(n, rows, succ, params, block):
    """Lexicographically least incidence string over colour-respecting orders."""
    pred = None
    if succ is not None:
        pred = [0] * n
        for i in range(n):
            for j in _bits(succ[i]):
                pred[j] |= 1 << i
    pidx = {v: i for i, v in enumerate(params)}
    init_sig = []
    for v in range(n):
        if v in pidx:
            key = (0, pidx[v])
        else:
            key = (1 if v in block else 2, 0)
        init_sig.append(key)
    ranks = {s: i for i, s in enumerate(sorted(set(init_sig)))}
    colors = _refine(n, rows, succ, pred, [ranks[s] for s in init_sig])
    classes = sorted(set(colors))
    slots = []  # colour required at each position
    for c in classes:
        slots.extend([c] * colors.count(c))

    best = [None]
    order = []
    placed_mask = 0

    def segment(v):
        seg = []
        for u in order:
            seg.append((rows[u] >> v) & 1)
            if succ is not None:
                seg.append((succ[u] >> v) & 1)
                seg.append((succ[v] >> u) & 1)
        return seg

    def twins(u, v):
        other = ~((1 << u) | (1 << v))
        if (rows[u] ^ rows[v]) & other:
            return False
        if succ is not None:
            if (succ[u] ^ succ[v]) & other or (pred[u] ^ pred[v]) & other:
                return False
            if (succ[u] >> v) & 1 != (succ[v] >> u) & 1:
                return False
        return True

    def rec(t, prefix, tight):
        nonlocal placed_mask
        if t == n:
            if best[0] is None or prefix < best[0]:
                best[0] = list(prefix)
            return
        tried = []
        for v in range(n):
            if (placed_mask >> v) & 1 or colors[v] != slots[t]:
                continue
            if any(twins(u, v) for u in tried):
                continue
            tried.append(v)
            seg = segment(v)
            cand = prefix + seg
            still_tight = tight
            if best[0] is not None and tight:
                ref = best[0][:len(cand)]
                if cand > ref:
                    continue
                still_tight = cand == ref
            order.append(v)
            placed_mask |= 1 << v
            rec(t + 1, cand, still_tight)
            order.pop()
            placed_mask &= ~(1 << v)

    rec(0, [], True)
    return "".join(map(str, best[0] or []))


@lru_cache(maxsize=200_000)
def _canon_cached(n, rows, succ, params, block):
    return _canon(n, rows, succ, params, frozenset(block))


def canonical_form(M, params=(), bound=CANON_BOUND):
    params = tuple(params)
    if M.n > bound:
        raise UnsupportedSize(f"canonical form limited to {bound} vertices, got {M.n}")
    if len(set(params)) != len(params):
        raise ValueError("parameter tuple must not repeat vertices")
    p0 = tuple(v - 1 for v in params)
    for v in params:
        _check_vertex(M.n, v)
    bits = _canon_cached(M.n, M.rows, M.succ, p0, ())
    return CanonicalForm((M.n, len(params), 0, M.has_successor, bits))


@dataclass(frozen=True, order=True)
class PairType:
    """Isomorphism type of a pair A <= B; A occupies the first ``a_size``
    positions of the canonical order."""

    form: CanonicalForm

    @property
    def code(self):
        return str(self.form)

    @property
    def b_size(self):
        return self.form.code[0]

    @property
    def a_size(self):
        return self.form.code[2]

    @property
    def reflexive(self):
        return self.a_size == self.b_size

    @classmethod
    def parse(cls, text):
        return cls(CanonicalForm.parse(text))

    def realize(self):
        """A representative (B, A) with A = {1, ..., a_size}."""
        return decode_incidence(self.form), frozenset(range(1, self.a_size + 1))

    def __str__(self):
        return self.code


def decode_incidence(form):
    n, p, a, has_s, bits = form.code
    rows = [0] * n
    succ = [0] * n if has_s else None
    it = iter(bits)
    for t in range(n):
        for s in range(t):
            if next(it) == "1":
                rows[s] |= 1 << t
                rows[t] |= 1 << s
            if has_s:
                if next(it) == "1":
                    succ[s] |= 1 << t
                if next(it) == "1":
                    succ[t] |= 1 << s
    return Structure(n, tuple(rows), tuple(succ) if has_s else None)


def pair_type(A, B, bound=CANON_BOUND):
    """Pair type of the vertex set ``A`` inside the structure ``B``."""
    A = frozenset(A)
    if not A <= set(B.vertices):
        raise ValueError("A must be a subset of the vertices of B")
    if B.n > bound:
        raise UnsupportedSize(f"pair types limited to {bound} vertices, got {B.n}")
    block = tuple(sorted(v - 1 for v in A))
    bits = _canon_cached(B.n, B.rows, B.succ, (), block)
    return PairType(CanonicalForm((B.n, 0, len(A), B.has_successor, bits)))


def pair_type_in(M, A_set, B_set):
    """Pair type of (M|A_set, M|B_set) for vertex sets of a larger structure."""
    sub, labels = restrict(M, B_set)
    inv = {v: i + 1 for i, v in enumerate(labels)}
    return pair_type({inv[v] for v in A_set}, sub)


# free amalgamation ----------------------------------------------------------


def free_amalgam_check(D, B, C1, C2):
    """C1 and C2 are freely amalgamated over B inside D."""
    B, C1, C2 = set(B), set(C1), set(C2)
    for v in B | C1 | C2:
        _check_vertex(D.n, v)
    if not (C1 & C2) <= B:
        return False
    left = C1 | B
    right = C2 | B
    only_left = C1 - B
    only_right = C2 - B
    for u in only_left:
        for v in only_right:
            if D.adjacent(u, v) or D.successor(u, v) or D.successor(v, u):
                if not ({u, v} <= left or {u, v} <= right):
                    return False
    return True


class Amalgam(NamedTuple):
    structure: Structure
    map1: dict  # vertex of N1 -> vertex of the amalgam
    map2: dict


def free_amalgam_build(N0, N1, N2, emb1=None, emb2=None):
    """Disjoint union of N1 and N2 glued along the images of N0.

    ``emb1``/``emb2`` map N0's vertices into N1/N2 (default: identity on
    1..|N0|).  The shared part takes labels 1..|N0|, then the rest of N1, then
    the rest of N2.
    """
    s = N0.n
    emb1 = dict(emb1) if emb1 is not None else {v: v for v in N0.vertices}
    emb2 = dict(emb2) if emb2 is not None else {v: v for v in N0.vertices}
    for emb, side in ((emb1, N1), (emb2, N2)):
        if not is_embedding(emb, N0, side):
            raise ValueError("N0 does not embed into a side via the given map")
    map1 = {emb1[v]: v for v in N0.vertices}
    map2 = {emb2[v]: v for v in N0.vertices}
    nxt = s + 1
    for v in N1.vertices:
        if v not in map1:
            map1[v] = nxt
            nxt += 1
    for v in N2.vertices:
        if v not in map2:
            map2[v] = nxt
            nxt += 1
    n = nxt - 1
    edges = set()
    succ = set()
    for side, m in ((N1, map1), (N2, map2)):
        for i, j in side.edges():
            a, b = sorted((m[i], m[j]))
            edges.add((a, b))
        for i, j in side.succ_pairs():
            succ.add((m[i], m[j]))
    has_s = N0.has_successor or N1.has_successor or N2.has_successor
    N = Structure.from_edges(n, sorted(edges), successor=sorted(succ) if has_s else False)
    return Amalgam(N, map1, map2)


# enumeration ----------------------------------------------------------------


def enumerate_structures(n, vocab=GRAPH, bound=ENUM_BOUND):
    """Every labelled structure on [n] exactly once (S, if present, is the
    successor of [n])."""
    if n > bound:
        raise UnsupportedSize(f"enumeration limited to {bound} vertices")
    pairs = list(combinations(range(1, n + 1), 2))
    for bits in product((0, 1), repeat=len(pairs)):
        yield Structure.from_edges(n, [e for e, b in zip(pairs, bits) if b],
                                   successor=vocab.successor)


def extensions_of(base, total, successor=False):
    """All graphs on [total] whose restriction to [|base|] equals ``base``."""
    s = base.n
    if total < s:
        return
    pairs = [(i, j) for j in range(s + 1, total + 1) for i in range(1, j)]
    for bits in product((0, 1), repeat=len(pairs)):
        edges = base.edges() + [e for e, b in zip(pairs, bits) if b]
        yield Structure.from_edges(total, edges, successor=successor)
