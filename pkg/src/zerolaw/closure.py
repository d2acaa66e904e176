"""Catalog-driven closure cl^k and cl^{k,m}, with checkers for the closure
axioms, locality, transparency and first-order definability.

A catalog lists pair types (A, B) declared algebraic.  A *literal* catalog
means exactly what it lists (plus every reflexive pair).  A *normalized*
catalog treats its entries as generators: A <=_i B holds when B can be reached
from A by repeatedly adding a copy D of a generator whose base part already
lies in the current set.  That derived relation is reflexive, transitive,
monotone in the base, and closed under enlarging the base of a generator.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations, permutations, product

from .embeddings import ExtensionQuery, enumerate_embeddings, enumerate_extensions
from .errors import UnsupportedSize
from .logic.formula import Atom, Eq, Exists, Not, conj, disj
from .structures import (
    PairType, PartialEmbedding, Structure, enumerate_structures, pair_type,
    restrict,
)

MATERIALIZE_BOUND = 4
MATERIALIZE_BOUND_S = 3
BRUTE_FORCE_BOUND = 14
PRECOMPUTE_BOUND = 64


@dataclass(frozen=True)
class ClosureCatalog:
    algebraic: frozenset = frozenset()
    k_max: int = 3
    normalized: bool = False
    provenance: str = "hand-built"

    def __post_init__(self):
        alg = frozenset(self.algebraic)
        for t in alg:
            if not isinstance(t, PairType):
                raise TypeError("catalog entries must be PairType values")
            if t.b_size > self.k_max:
                raise ValueError(f"entry {t} larger than k_max={self.k_max}")
        object.__setattr__(self, "algebraic", alg)

    @classmethod
    def from_pairs(cls, pairs, k_max=None, normalized=False, provenance="hand-built"):
        """``pairs`` holds (B, A) with B a Structure and A a vertex set of B."""
        types = [pair_type(A, B) for B, A in pairs]
        if k_max is None:
            k_max = max((t.b_size for t in types), default=1)
        return cls(frozenset(types), k_max, normalized, provenance)

    def normalize(self):
        return ClosureCatalog(self.algebraic, self.k_max, True, self.provenance)

    def with_k_max(self, k_max):
        return ClosureCatalog(self.algebraic, k_max, self.normalized, self.provenance)

    @property
    def generators(self):
        return _realized(self.algebraic)

    @property
    def successor(self):
        return any(t.form.code[3] for t in self.algebraic)

    def sorted_entries(self):
        return sorted(self.algebraic, key=lambda t: (t.b_size, t.a_size, t.code))

    def to_json_obj(self):
        return {
            "k_max": self.k_max,
            "normalized": self.normalized,
            "provenance": self.provenance,
            "entries": [{"pair": t.code, "A_size": t.a_size, "B_size": t.b_size,
                         "flag": "algebraic"} for t in self.sorted_entries()],
        }

    def to_json(self):
        return json.dumps(self.to_json_obj(), indent=2, sort_keys=True)

    @classmethod
    def from_json_obj(cls, obj):
        if isinstance(obj, list):
            obj = {"entries": obj}
        entries = obj.get("entries", [])
        types = []
        for e in entries:
            if e.get("flag", "algebraic") != "algebraic":
                continue
            t = PairType.parse(e["pair"])
            if t.a_size != e.get("A_size", t.a_size) or t.b_size != e.get("B_size", t.b_size):
                raise ValueError(f"size fields disagree with the code {e['pair']}")
            types.append(t)
        k_max = obj.get("k_max", max((t.b_size for t in types), default=1))
        return cls(frozenset(types), int(k_max), bool(obj.get("normalized", False)),
                   obj.get("provenance", "hand-built"))

    @classmethod
    def from_json(cls, text):
        return cls.from_json_obj(json.loads(text))


def _realized(types):
    out = []
    for t in sorted(types, key=lambda t: (t.b_size, t.code)):
        if t.reflexive:
            continue
        D, A = t.realize()
        out.append((t, D, A))
    return tuple(out)


# named catalogs ---------------------------------------------------------------


def empty_catalog(k_max=3):
    return ClosureCatalog(frozenset(), k_max, True)


def common_neighbor_catalog(k_max=3, normalized=True):
    """A common neighbour of an adjacent pair is algebraic."""
    return ClosureCatalog.from_pairs([(Structure.complete(3), {1, 2})], k_max, normalized)


def successor_anchor_catalog(k_max=3):
    """A consecutive triple spanning a triangle is algebraic over nothing."""
    tri = Structure.from_edges(3, [(1, 2), (2, 3), (1, 3)], successor=True)
    return ClosureCatalog.from_pairs([(tri, set())], k_max, True)


# the derived relation -----------------------------------------------------------


def _view(M, cat):
    """The reduct a catalog speaks about: graph catalogs ignore S."""
    if M.has_successor and not cat.successor and cat.algebraic:
        return Structure(M.n, M.rows, None, M.positions)
    return M


def is_algebraic(cat, A, B):
    """Whether the vertex set A of the structure B satisfies A <=_i B under ``cat``."""
    A = frozenset(A)
    B = _view(B, cat)
    if A == frozenset(B.vertices):
        return True
    if not cat.normalized:
        if B.n > cat.k_max:
            return False
        return pair_type(A, B) in cat.algebraic
    return _derived_fixpoint(cat, A, B) == frozenset(B.vertices)


def _derived_fixpoint(cat, A, B):
    C = set(A)
    gens = [(t.b_size, t.a_size) for t in cat.algebraic if not t.reflexive]
    if not gens:
        return frozenset(C)
    sizes = sorted({b for b, _ in gens})
    changed = True
    while changed:
        changed = False
        for size in sizes:
            for D in combinations(B.vertices, size):
                Dset = frozenset(D)
                if Dset <= C:
                    continue
                inside = sorted(Dset & C)
                sub, labels = restrict(B, D)
                inv = {v: i + 1 for i, v in enumerate(labels)}
                hit = False
                for a in range(len(inside) + 1):
                    for A0 in combinations(inside, a):
                        if pair_type({inv[v] for v in A0}, sub) in cat.algebraic:
                            hit = True
                            break
                    if hit:
                        break
                if hit:
                    C |= Dset
                    changed = True
    return frozenset(C)


def materialize(cat, k=None):
    """A literal catalog listing every algebraic pair type with |B| <= k."""
    k = cat.k_max if k is None else k
    succ = cat.successor
    bound = MATERIALIZE_BOUND_S if succ else MATERIALIZE_BOUND
    if k > bound:
        raise UnsupportedSize(f"materialization limited to |B| <= {bound}")
    types = set()
    for n in range(1, k + 1):
        for B in _all_structures(n, succ):
            for a in range(n):
                for A in combinations(range(1, n + 1), a):
                    t = pair_type(A, B)
                    if t not in types and is_algebraic(cat, A, B):
                        types.add(t)
    return ClosureCatalog(frozenset(types), k, False, cat.provenance + " (materialized)")


def _all_structures(n, succ):
    if not succ:
        yield from enumerate_structures(n)
        return
    ordered = [(i, j) for i in range(1, n + 1) for j in range(1, n + 1) if i != j]
    for g in enumerate_structures(n):
        for bits in product((0, 1), repeat=len(ordered)):
            yield Structure.from_edges(n, g.edges(), successor=[p for p, b in zip(ordered, bits) if b])


# cl^k -------------------------------------------------------------------------


def _check_k(cat, k):
    if k < 1:
        raise ValueError("k must be at least 1")
    if k > cat.k_max:
        raise ValueError(f"k={k} exceeds the catalog bound k_max={cat.k_max}")


def _embeddings_into(M, D_sub, allowed):
    """Embeddings of D_sub into M whose image lies in ``allowed``."""
    if D_sub.n == 0:
        return [PartialEmbedding(())]
    sub, labels = restrict(M, allowed)
    out = []
    for e in enumerate_embeddings(D_sub, sub):
        out.append(PartialEmbedding(tuple((a, labels[v - 1]) for a, v in e.pairs)))
    return out


def cl_k(M, X, k, cat):
    """Union of X and every B with |B| <= k and B ∩ X <=_i B."""
    _check_k(cat, k)
    X = frozenset(X)
    for v in X:
        if not (1 <= v <= M.n):
            raise ValueError(f"vertex {v} not in the structure")
    M = _view(M, cat)
    if cat.normalized:
        return _cl_normalized(M, X, k, cat)
    return _cl_literal(M, X, k, cat)


def _cl_literal(M, X, k, cat):
    out = set(X)
    for t, D, A in _realized(cat.algebraic):
        if D.n > k or (D.has_successor and not M.has_successor):
            continue
        A_sub = restrict(D, A).structure
        for f0 in _embeddings_into(M, A_sub, X):
            for g in enumerate_extensions(ExtensionQuery(M, f0, D)):
                new = g.range - f0.range
                if not (new & X):
                    out |= new
    return frozenset(out)


def _cl_normalized(M, X, k, cat):
    gens = [(D, A) for _, D, A in _realized(cat.algebraic)
            if D.n <= k and (M.has_successor or not D.has_successor)]
    if M.n <= PRECOMPUTE_BOUND:
        copies = _all_copies(M, gens)
        step = lambda C, anchors: (d for a, d in copies if a <= anchors)
    else:
        step = lambda C, anchors: _anchored_copies(M, gens, C, anchors, k)
    out = set(X)
    start = frozenset()
    seen = {start}
    stack = [start]
    while stack:
        C = stack.pop()
        for img in step(C, C | X):
            C2 = C | img
            if len(C2) > k or C2 in seen:
                continue
            seen.add(C2)
            out |= C2
            stack.append(C2)
    return frozenset(out)


def _all_copies(M, gens):
    """Every (g(A), g(D)) for embeddings g of a generator D into M."""
    out = set()
    for D, A in gens:
        for g in enumerate_embeddings(D, M):
            m = g.mapping
            out.add((frozenset(m[a] for a in A), g.range))
    return sorted(out, key=lambda p: (sorted(p[0]), sorted(p[1])))


def _anchored_copies(M, gens, C, anchors, k):
    for D, A in gens:
        A_sub = restrict(D, A).structure
        for f0 in _embeddings_into(M, A_sub, anchors):
            if len(C | f0.range) + D.n - len(A) > k:
                continue
            for g in enumerate_extensions(ExtensionQuery(M, f0, D)):
                yield g.range


def cl_k_bruteforce(M, X, k, cat):
    """Reference closure by sweeping every B with |B| <= k."""
    _check_k(cat, k)
    if M.n > BRUTE_FORCE_BOUND:
        raise UnsupportedSize(f"subset sweep limited to {BRUTE_FORCE_BOUND} vertices")
    X = frozenset(X)
    M = _view(M, cat)
    out = set(X)
    for size in range(1, k + 1):
        for B in combinations(M.vertices, size):
            Bset = frozenset(B)
            if Bset <= out:
                continue
            sub, labels = restrict(M, B)
            inv = {v: i + 1 for i, v in enumerate(labels)}
            if is_algebraic(cat, {inv[v] for v in Bset & X}, sub):
                out |= Bset
    return frozenset(out)


@dataclass(frozen=True)
class ClosureParams:
    k: int
    m: int

    def __post_init__(self):
        if self.k < 1 or self.m < 0:
            raise ValueError("need k >= 1 and m >= 0")


def cl_km(M, X, params, cat):
    _check_k(cat, params.k)
    cur = frozenset(X)
    for _ in range(params.m):
        nxt = cl_k(M, cur, params.k, cat)
        if nxt == cur:
            break
        cur = nxt
    return cur


def closure_in(M, N, X, k, cat):
    """cl^k(X, M|N) expressed in the labels of M."""
    sub, labels = restrict(M, N)
    inv = {v: i + 1 for i, v in enumerate(labels)}
    inner = cl_k(sub, {inv[v] for v in X}, k, cat)
    return frozenset(labels[v - 1] for v in inner)


# checkers -------------------------------------------------------------------------


@dataclass
class CheckReport:
    results: dict = field(default_factory=dict)
    witnesses: dict = field(default_factory=dict)

    def record(self, clause, ok, witness=None):
        prev = self.results.get(clause, True)
        self.results[clause] = prev and ok
        if not ok and clause not in self.witnesses:
            self.witnesses[clause] = witness

    @property
    def passed(self):
        return all(self.results.values())


def check_axioms(cat, M, X, Y, k, l, perm=None):
    """Closure-operation axioms for cl^k on (M, X ⊆ Y) and k <= l.

    ``perm`` (a permutation of 1..n as a dict) drives the isomorphism clause;
    the reversal of [n] is used by default.
    """
    X, Y = frozenset(X), frozenset(Y)
    if not X <= Y <= frozenset(M.vertices):
        raise ValueError("need X ⊆ Y ⊆ M")
    if not k <= l <= cat.k_max:
        raise ValueError("need k <= l <= k_max")
    rep = CheckReport()
    cX = cl_k(M, X, k, cat)
    cY = cl_k(M, Y, k, cat)
    full = frozenset(M.vertices)
    rep.record("a", X <= cX <= full and cX <= cY, (sorted(X), sorted(cX), sorted(cY)))
    for N in {cX, cX | Y}:
        inner = closure_in(M, N, X, k, cat)
        rep.record("b_i", inner == cX, (sorted(N), sorted(inner), sorted(cX)))
    for N in {X, Y}:
        inner = closure_in(M, N, X, k, cat)
        rep.record("b_ii", inner <= cX, (sorted(N), sorted(inner), sorted(cX)))
    cl_l = cl_k(M, X, l, cat)
    rep.record("c", cX <= cl_l, (k, l, sorted(cX), sorted(cl_l)))
    if perm is None:
        perm = {v: M.n + 1 - v for v in M.vertices}
    image = Structure.from_edges(M.n, [(perm[i], perm[j]) for i, j in M.edges()],
                                 successor=[(perm[i], perm[j]) for i, j in M.succ_pairs()]
                                 if M.has_successor else False)
    cP = cl_k(image, {perm[v] for v in X}, k, cat)
    rep.record("d", cP == frozenset(perm[v] for v in cX), (sorted(cX), sorted(cP)))
    return rep


def check_iterate_containment(M, X, k, m, cat):
    """cl^{k,m}(X) ⊆ cl^{k^m}(X)."""
    big = k ** m
    if big > cat.k_max:
        raise UnsupportedSize(f"k^m = {big} exceeds the catalog bound {cat.k_max}")
    if m == 0:
        return frozenset(X) <= cl_k(M, X, 1, cat)
    return cl_km(M, X, ClosureParams(k, m), cat) <= cl_k(M, X, big, cat)


def check_local(cat, k, M, X=()):
    """Each z in cl^k(X, M) lies in some Y, |Y| <= k, with cl^k(Y ∩ X, M|Y) = Y."""
    X = frozenset(X)
    rep = CheckReport()
    for z in sorted(cl_k(M, X, k, cat)):
        found = None
        others = [v for v in M.vertices if v != z]
        for size in range(0, k):
            for rest in combinations(others, size):
                Y = frozenset(rest) | {z}
                if closure_in(M, Y, Y & X, k, cat) == Y:
                    found = Y
                    break
            if found:
                break
        rep.record("local", found is not None, z)
        rep.witnesses.setdefault("Y", {})[z] = sorted(found) if found else None
    rep.results.setdefault("local", True)
    return rep


def check_transparent(cat, k, r=None):
    """Every algebraic (A, B) with |B| <= r has cl^k(A, B) = B (r defaults to k)."""
    r = k if r is None else r
    _check_k(cat, k)
    types = cat.algebraic if not cat.normalized else materialize(cat, r).algebraic
    for t in types:
        if t.b_size > r or t.reflexive:
            continue
        B, A = t.realize()
        if cl_k(B, A, k, cat) != frozenset(B.vertices):
            return False
    return True


def check_smooth(cat, N, A, B, C):
    """B <_i B ∪ C  <=>  A <_i C for A ⊆ B, A ⊆ C free over A inside N."""
    from .structures import free_amalgam_check

    A, B, C = frozenset(A), frozenset(B), frozenset(C)
    if not free_amalgam_check(N, A, B, C):
        raise ValueError("B and C must be freely amalgamated over A")
    BC = B | C
    left = is_algebraic(cat, *_relative(N, B, BC))
    right = is_algebraic(cat, *_relative(N, A, C))
    return left == right


def _relative(M, inner, outer):
    sub, labels = restrict(M, outer)
    inv = {v: i + 1 for i, v in enumerate(labels)}
    return {inv[v] for v in inner}, sub


# definability -----------------------------------------------------------------------


def closure_defining_formula(cat, k, l, y="y", xs=None):
    """psi(y, x0..x_{l-1}) with M |= psi(b, a) iff b ∈ cl^k({a}, M).

    One disjunct per algebraic type (A, B) with |B| <= k, per placement of A on
    the parameters and per choice of the new vertex named by y: the atomic
    diagram of B with the remaining new vertices existentially quantified and
    kept off the parameters.
    """
    _check_k(cat, k)
    xs = list(xs) if xs is not None else [f"x{i}" for i in range(l)]
    if len(xs) != l:
        raise ValueError("need exactly l parameter names")
    types = materialize(cat, k).algebraic if cat.normalized else cat.algebraic
    disjuncts = [Eq(y, x) for x in xs]
    used = set(xs) | {y}
    for t in sorted(types, key=lambda t: (t.b_size, t.code)):
        if t.reflexive or t.b_size > k:
            continue
        B, A = t.realize()
        a = t.a_size
        new = list(range(a + 1, B.n + 1))
        for place in permutations(range(l), a):
            for yv in new:
                names = {}
                for i, p in enumerate(place):
                    names[i + 1] = xs[p]
                names[yv] = y
                zs = []
                for v in new:
                    if v != yv:
                        z = _fresh(used | set(zs), "z")
                        zs.append(z)
                        names[v] = z
                body = conj(_diagram(B, names) + [
                    Not(Eq(names[v], x)) for v in new for x in xs])
                for z in reversed(zs):
                    body = Exists(z, body)
                disjuncts.append(body)
    return disj(disjuncts, empty=Not(Eq(y, y)))


def _fresh(avoid, stem):
    i = 0
    while f"{stem}{i}" in avoid:
        i += 1
    return f"{stem}{i}"


def _diagram(B, names):
    out = []
    for u, v in combinations(B.vertices, 2):
        a, b = names[u], names[v]
        out.append(Not(Eq(a, b)))
        out.append(Atom("E", (a, b)) if B.adjacent(u, v) else Not(Atom("E", (a, b))))
        if B.has_successor:
            for p, q, x, yv in ((u, v, a, b), (v, u, b, a)):
                lit = Atom("S", (x, yv))
                out.append(lit if B.successor(p, q) else Not(lit))
    return out
