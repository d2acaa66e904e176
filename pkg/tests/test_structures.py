import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import brute_isomorphic, graphs
from zerolaw.errors import UnsupportedSize
from zerolaw.structures import (
    GRAPH, GRAPH_S, CanonicalForm, PairType, PartialEmbedding, Structure, Symbol, Vocabulary,
    canonical_form, enumerate_structures, extensions_of, free_amalgam_build, free_amalgam_check,
    is_embedding, pair_type, restrict,
)

K2, K3, P3 = Structure.complete(2), Structure.complete(3), Structure.path(3)


def test_vocabulary_rules():
    assert GRAPH.arity("E") == 2
    assert GRAPH_S.successor
    with pytest.raises(ValueError):
        Vocabulary((Symbol("E", 2), Symbol("E", 2)))


def test_constructor_invariants():
    for M in (K3, P3, Structure.cycle(5), Structure.star(3), Structure.empty(4),
              Structure.from_edges(4, [(1, 3)], successor=True)):
        assert M.check_invariants()
    with pytest.raises(ValueError):
        Structure.from_edges(3, [(1, 1)])
    with pytest.raises(ValueError):
        Structure.from_edges(3, [(1, 4)])


def test_successor_is_consecutive_pairs():
    M = Structure.from_edges(4, [], successor=True)
    assert M.succ_pairs() == [(1, 2), (2, 3), (3, 4)]
    assert M.is_full_successor()


def test_json_round_trip():
    M = Structure.from_edges(5, [(1, 2), (2, 5)], successor=True)
    assert Structure.from_json(M.to_json()) == M
    obj = M.to_json_obj()
    assert obj["edges"] == [[1, 2], [2, 5]] and obj["successor"] is True


def test_restrict_examples():
    assert restrict(K3, {1, 2}).structure == K2
    assert restrict(K3, set()).structure == Structure.empty(0)
    # ends of a path are not adjacent
    sub = restrict(P3, {1, 3}).structure
    assert sub.n == 2 and not sub.adjacent(1, 2)
    with pytest.raises(ValueError):
        restrict(K3, {4})


def test_restrict_keeps_positions():
    r = restrict(Structure.path(6), {2, 5, 6})
    assert r.labels == (2, 5, 6)
    assert r.structure.positions == (2, 5, 6)


@given(graphs(max_n=7), st.data())
def test_restrict_composes(M, data):
    Y = data.draw(st.sets(st.sampled_from(list(M.vertices) or [1]), max_size=M.n)) & set(M.vertices)
    X = data.draw(st.sets(st.sampled_from(sorted(Y) or [1]), max_size=len(Y))) & Y
    outer = restrict(M, Y)
    inv = {v: i + 1 for i, v in enumerate(outer.labels)}
    inner = restrict(outer.structure, {inv[v] for v in X})
    assert inner.structure == restrict(M, X).structure
    assert tuple(outer.labels[i - 1] for i in inner.labels) == restrict(M, X).labels


def test_is_embedding_examples():
    assert is_embedding({1: 1, 2: 2}, K2, K3)
    assert not is_embedding({1: 1, 2: 3}, K2, P3)
    assert is_embedding({1: 2}, Structure.empty(1), P3)
    assert not is_embedding({1: 1, 2: 1}, Structure.empty(2), P3)


def test_canonical_form_examples():
    codes = {canonical_form(Structure.from_edges(3, [(a, b), (b, c), (a, c)]))
             for a, b, c in itertools.permutations((1, 2, 3))}
    assert len(codes) == 1
    assert canonical_form(P3) != canonical_form(Structure.from_edges(3, [(1, 2)]))
    assert canonical_form(K2, (1,)) == canonical_form(K2, (2,))
    with pytest.raises(UnsupportedSize):
        canonical_form(Structure.empty(11))


def test_canonical_form_string_round_trip():
    f = canonical_form(Structure.cycle(5), (2,))
    assert CanonicalForm.parse(str(f)) == f


def test_class_counts_match_known_sequence():
    # unlabelled graphs on n vertices: 1, 2, 4, 11, 34
    for n, expect in zip(range(1, 6), (1, 2, 4, 11, 34)):
        assert len({canonical_form(M) for M in enumerate_structures(n)}) == expect


def test_canonical_form_is_complete_up_to_four_vertices():
    for n in range(1, 5):
        gs = list(enumerate_structures(n))
        for M1, M2 in itertools.combinations(gs, 2):
            assert (canonical_form(M1) == canonical_form(M2)) == brute_isomorphic(M1, M2)


@settings(max_examples=60)
@given(graphs(min_n=1, max_n=6), graphs(min_n=1, max_n=6))
def test_canonical_form_matches_brute_force_with_params(M1, M2):
    p1, p2 = (1,), (M2.n,)
    same = canonical_form(M1, p1) == canonical_form(M2, p2)
    assert same == brute_isomorphic(M1, M2, p1, p2)


@given(graphs(max_n=7), st.randoms(use_true_random=False))
def test_canonical_form_invariant_under_relabelling(M, rnd):
    perm = list(M.vertices)
    rnd.shuffle(perm)
    f = dict(zip(M.vertices, perm))
    image = Structure.from_edges(M.n, [(f[i], f[j]) for i, j in M.edges()])
    assert canonical_form(image) == canonical_form(M)


def test_canonical_form_with_successor_distinguishes_direction():
    M1 = Structure.from_edges(3, [(1, 2)], successor=True)
    M2 = Structure.from_edges(3, [(2, 3)], successor=True)
    assert canonical_form(M1) != canonical_form(M2)
    assert not brute_isomorphic(M1, M2)


def test_pair_type_examples():
    pendant = pair_type({1}, K2)
    assert (pendant.a_size, pendant.b_size) == (1, 2)
    cn = pair_type({1, 2}, K3)
    assert cn == pair_type({2, 3}, K3)
    assert pair_type(set(), K2) == pair_type(set(), Structure.from_edges(2, [(2, 1)]))
    assert PairType.parse(cn.code) == cn
    B, A = cn.realize()
    assert pair_type(A, B) == cn
    with pytest.raises(ValueError):
        pair_type({4}, K3)


def test_free_amalgam_check_examples():
    assert free_amalgam_check(P3, {2}, {1, 2}, {2, 3})
    assert not free_amalgam_check(K3, {2}, {1, 2}, {2, 3})
    assert not free_amalgam_check(P3, {2}, {1, 2, 3}, {3})


def test_free_amalgam_build_examples():
    N0 = Structure.empty(1)
    am = free_amalgam_build(N0, K2, K2)
    assert am.structure == Structure.from_edges(3, [(1, 2), (1, 3)])
    assert canonical_form(am.structure) == canonical_form(P3)
    two = free_amalgam_build(Structure.empty(0), K2, K2).structure
    assert two == Structure.from_edges(4, [(1, 2), (3, 4)])
    with pytest.raises(ValueError):
        free_amalgam_build(K2, Structure.empty(2), K2)


@settings(max_examples=80)
@given(st.integers(0, 2), st.data())
def test_build_then_check(s, data):
    N0 = data.draw(graphs(min_n=s, max_n=s))
    t1 = data.draw(st.integers(s, s + 3))
    t2 = data.draw(st.integers(s, s + 3))
    N1 = data.draw(st.sampled_from(list(extensions_of(N0, t1))))
    N2 = data.draw(st.sampled_from(list(extensions_of(N0, t2))))
    am = free_amalgam_build(N0, N1, N2)
    C1 = set(am.map1.values())
    C2 = set(am.map2.values())
    shared = set(range(1, s + 1))
    assert C1 & C2 == shared
    assert free_amalgam_check(am.structure, shared, C1, C2)
    assert restrict(am.structure, C1).structure == N1


@settings(max_examples=60)
@given(graphs(min_n=1, max_n=6), st.data())
def test_check_passes_only_for_decomposable(D, data):
    verts = list(D.vertices)
    B = data.draw(st.sets(st.sampled_from(verts), max_size=2))
    C1 = data.draw(st.sets(st.sampled_from(verts))) | B
    C2 = (set(verts) - C1) | B
    if not free_amalgam_check(D, B, C1, C2):
        return
    # rebuild from the restrictions and compare
    order = sorted(B) + sorted(C1 - B) + sorted(C2 - B)
    rel = {v: i + 1 for i, v in enumerate(order)}
    N0 = restrict(D, B)
    N1 = restrict(D, C1)
    N2 = restrict(D, C2)
    e1 = {i + 1: N1.labels.index(v) + 1 for i, v in enumerate(N0.labels)}
    e2 = {i + 1: N2.labels.index(v) + 1 for i, v in enumerate(N0.labels)}
    am = free_amalgam_build(N0.structure, N1.structure, N2.structure, e1, e2)
    Dre = Structure.from_edges(D.n, [(rel[i], rel[j]) for i, j in D.edges()])
    assert am.structure == Dre


def test_partial_embedding_accessors():
    f = PartialEmbedding.of({2: 5, 1: 3})
    assert f.pairs == ((1, 3), (2, 5))
    assert f.domain == {1, 2} and f.range == {3, 5}


def test_enumerate_structures_counts():
    assert sum(1 for _ in enumerate_structures(1)) == 1
    assert sum(1 for _ in enumerate_structures(3)) == 2 ** 3
    assert sum(1 for _ in enumerate_structures(4)) == 2 ** 6
    assert len(set(enumerate_structures(4))) == 64
    with pytest.raises(UnsupportedSize):
        next(enumerate_structures(7))


def test_named_structures():
    assert Structure.named("K3") == K3
    assert Structure.named("Star3").degree(1) == 3
    with pytest.raises(ValueError):
        Structure.named("Q5")
