"""Quantifier-rank types, the Ehrenfeucht-Fraisse game, and the addition
property of free amalgams.

The rank-0 type of (M, a) is its atomic diagram.  The rank-d type is the
atomic diagram together with the set of rank-(d-1) types of (M, a b) over all
b in M.  Two parameterised structures have the same rank-d type iff they
satisfy the same formulas of quantifier depth <= d.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from ..errors import AdditionTheoremViolation, UnsupportedSize
from ..structures import Structure, canonical_form, extensions_of, free_amalgam_build, is_embedding
from .formula import Atom, Eq, Exists, Forall, Not, conj, disj

MAX_RANK = 4
MAX_SIZE = 12


def atomic_code(M, params):
    """Bits per ordered index pair i < j: equal, E, S(a_i, a_j), S(a_j, a_i)."""
    out = []
    s = M.has_successor
    for j in range(len(params)):
        for i in range(j):
            a, b = params[i], params[j]
            code = (a == b, M.adjacent(a, b) if a != b else False)
            if s:
                code += (M.successor(a, b), M.successor(b, a))
            out.append(code)
    return (s, tuple(out))


@dataclass(frozen=True, order=True)
class RankType:
    d: int
    arity: int
    code: tuple

    @property
    def atomic(self):
        return self.code[0] if self.d else self.code

    @property
    def children(self):
        if self.d == 0:
            return ()
        return tuple(RankType(self.d - 1, self.arity + 1, c) for c in self.code[1])


def _check_bounds(M, d):
    if d > MAX_RANK:
        raise UnsupportedSize(f"rank types limited to depth {MAX_RANK}")
    if M.n > MAX_SIZE:
        raise UnsupportedSize(f"rank types limited to {MAX_SIZE} vertices")
    if d < 0:
        raise ValueError("rank must be non-negative")


def rank_type(M, params=(), d=0):
    _check_bounds(M, d)
    params = tuple(params)
    for v in params:
        if not (1 <= v <= M.n):
            raise ValueError(f"parameter {v} outside the structure")
    memo = {}

    def go(tup, r):
        key = (tup, r)
        hit = memo.get(key)
        if hit is not None:
            return hit
        atomic = atomic_code(M, tup)
        if r == 0:
            code = atomic
        else:
            code = (atomic, tuple(sorted({go(tup + (b,), r - 1) for b in M.vertices})))
        memo[key] = code
        return code

    return RankType(d, len(params), go(params, d))


def equiv_d(M1, a1, M2, a2, d):
    if len(tuple(a1)) != len(tuple(a2)):
        raise ValueError("parameter tuples must have equal length")
    return rank_type(M1, a1, d) == rank_type(M2, a2, d)


def ef_game(M1, a1, M2, a2, d):
    """Duplicator wins the d-round game from (a1, a2); an independent oracle."""
    if len(tuple(a1)) != len(tuple(a2)):
        raise ValueError("parameter tuples must have equal length")

    @lru_cache(maxsize=None)
    def wins(x, y, r):
        if atomic_code(M1, x) != atomic_code(M2, y):
            return False
        if r == 0:
            return True
        for u in M1.vertices:
            if not any(wins(x + (u,), y + (v,), r - 1) for v in M2.vertices):
                return False
        for v in M2.vertices:
            if not any(wins(x + (u,), y + (v,), r - 1) for u in M1.vertices):
                return False
        return True

    if M1.has_successor != M2.has_successor:
        return False
    return wins(tuple(a1), tuple(a2), d)


def hintikka_formula(t, var_names=None):
    """A formula of depth t.d satisfied by (M, a) iff (M, a) has type t.

    Parameters are the free variables ``x0, x1, ...`` unless renamed.
    """
    names = list(var_names) if var_names is not None else []
    while len(names) < t.arity + t.d:
        names.append(f"x{len(names)}")

    def lits(atomic, k):
        has_s, bits = atomic
        out = []
        it = iter(bits)
        for j in range(k):
            for i in range(j):
                b = next(it)
                x, y = names[i], names[j]
                out.append(Eq(x, y) if b[0] else Not(Eq(x, y)))
                if not b[0]:
                    out.append(Atom("E", (x, y)) if b[1] else Not(Atom("E", (x, y))))
                if has_s:
                    for flag, pair in ((b[2], (x, y)), (b[3], (y, x))):
                        out.append(Atom("S", pair) if flag else Not(Atom("S", pair)))
        return out

    def build(code, r, k):
        if r == 0:
            return conj(lits(code, k), empty=None)
        atomic, kids = code
        y = names[k]
        parts = lits(atomic, k)
        sub = [build(c, r - 1, k + 1) for c in kids]
        sub = [s if s is not None else Eq(y, y) for s in sub]
        parts += [Exists(y, s) for s in sub]
        parts.append(Forall(y, disj(sub)))
        return conj(parts)

    phi = build(t.code, t.d, t.arity)
    return phi if phi is not None else Eq("x0", "x0") if t.arity else Forall("x0", Eq("x0", "x0"))


def _check_side(N0, N, emb):
    emb = dict(emb) if emb is not None else {v: v for v in N0.vertices}
    if not is_embedding(emb, N0, N):
        raise ValueError("N0 does not embed into a side via the given map")
    return tuple(emb[v] for v in N0.vertices)


def addition_check(N0, N1, N2, N1p, N2p, d, embs=None):
    """Whether equal rank-d types of the sides over N0 force equal rank-d types
    of the free amalgams.

    ``embs`` optionally gives the four embeddings of N0 (into N1, N2, N1p, N2p);
    the default is the identity on 1..|N0|.  When the sides are not pairwise
    d-equivalent the implication holds vacuously and ``True`` is returned.
    """
    embs = embs or (None, None, None, None)
    c1, c2, c1p, c2p = (_check_side(N0, N, e) for N, e in zip((N1, N2, N1p, N2p), embs))
    if not (equiv_d(N1, c1, N1p, c1p, d) and equiv_d(N2, c2, N2p, c2p, d)):
        return True
    amal = free_amalgam_build(N0, N1, N2, *_as_maps(N0, embs[0], embs[1]))
    amalp = free_amalgam_build(N0, N1p, N2p, *_as_maps(N0, embs[2], embs[3]))
    c = tuple(N0.vertices)
    return equiv_d(amal.structure, c, amalp.structure, c, d)


def _as_maps(N0, e1, e2):
    ident = {v: v for v in N0.vertices}
    return (dict(e1) if e1 is not None else ident), (dict(e2) if e2 is not None else ident)


@dataclass
class AmalgamTable:
    N0: Structure
    d: int
    max_side: int
    cells: dict
    sides: list

    def lookup(self, t1, t2):
        return self.cells[(t1, t2)]


def amalgam_type_table(N0, d, max_side):
    """Composition table (type of N1 over N0, type of N2 over N0) -> type of
    the free amalgam, over every graph side with at most ``max_side`` vertices
    that contains N0 as its first |N0| vertices.

    Raises ``AdditionTheoremViolation`` if a cell would receive two values.
    """
    c = tuple(N0.vertices)
    reps = {}
    for size in range(N0.n, max_side + 1):
        for N in extensions_of(N0, size, successor=False):
            key = canonical_form(N, c)
            if key not in reps:
                reps[key] = N
    sides = [(N, rank_type(N, c, d)) for N in reps.values()]
    cells = {}
    for N1, t1 in sides:
        for N2, t2 in sides:
            amal = free_amalgam_build(N0, N1, N2).structure
            t = rank_type(amal, c, d)
            prev = cells.setdefault((t1, t2), t)
            if prev != t:
                raise AdditionTheoremViolation(
                    f"two amalgam types for one cell: sides {N1!r} and {N2!r} over {N0!r}")
    return AmalgamTable(N0, d, max_side, cells, sides)
