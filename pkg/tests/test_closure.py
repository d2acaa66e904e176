import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import graphs
from zerolaw import closure
from zerolaw.closure import (
    ClosureCatalog, ClosureParams, check_axioms, check_iterate_containment, check_local,
    check_smooth, check_transparent, cl_k, cl_k_bruteforce, cl_km, closure_defining_formula,
    common_neighbor_catalog, empty_catalog, is_algebraic, materialize, successor_anchor_catalog,
)
from zerolaw.errors import UnsupportedSize
from zerolaw.logic import Eq, disj, evaluate_naive, free_vars
from zerolaw.sampler import CaseA, CaseB, sample
from zerolaw.structures import Structure, enumerate_structures

K3, P3 = Structure.complete(3), Structure.path(3)


@st.composite
def catalogs(draw, k_max=3, normalized=True):
    """A few random non-reflexive pair types with |B| <= 3."""
    pairs = []
    for _ in range(draw(st.integers(1, 3))):
        B = draw(graphs(min_n=2, max_n=3))
        A = draw(st.sets(st.sampled_from(list(B.vertices)), max_size=B.n - 1))
        pairs.append((B, A))
    return ClosureCatalog.from_pairs(pairs, k_max, normalized)


def test_catalog_json_round_trip():
    cat = ClosureCatalog.from_pairs([(K3, {1, 2}), (P3, {1})], 4, True, "test")
    text = cat.to_json()
    again = ClosureCatalog.from_json(text)
    assert again == cat and again.to_json() == text
    bare = ClosureCatalog.from_json_obj(cat.to_json_obj()["entries"])
    assert bare.algebraic == cat.algebraic
    with pytest.raises(ValueError):
        ClosureCatalog.from_pairs([(K3, {1})], 2)


def test_cl_k_examples():
    cn = common_neighbor_catalog()
    assert cl_k(K3, {1, 2}, 3, cn) == {1, 2, 3}
    assert cl_k(P3, {1, 3}, 3, cn) == {1, 3}
    assert cl_k(Structure.complete(5), {2}, 3, empty_catalog()) == {2}
    assert cl_k(K3, set(), 3, cn) == set()
    with pytest.raises(ValueError):
        cl_k(K3, {1}, 4, cn)


def test_literal_catalog_semantics():
    lit = common_neighbor_catalog(normalized=False)
    # the adjacent pair inside K4 has two common neighbours, each a K3 witness
    assert cl_k(Structure.complete(4), {1, 2}, 3, lit) == {1, 2, 3, 4}
    # a vertex adjacent to only one end gives no witness
    assert cl_k(Structure.from_edges(3, [(1, 2), (2, 3)]), {1, 2}, 3, lit) == {1, 2}


def test_cl_km_examples():
    cn = common_neighbor_catalog(k_max=9)
    M = Structure.from_edges(5, [(1, 2), (1, 3), (2, 3), (3, 4), (2, 4), (4, 5), (3, 5)])
    assert cl_km(M, {1, 2}, ClosureParams(3, 0), cn) == {1, 2}
    assert cl_km(M, {1, 2}, ClosureParams(3, 1), cn) == cl_k(M, {1, 2}, 3, cn) == {1, 2, 3}
    assert cl_km(M, {1, 2}, ClosureParams(3, 3), cn) == {1, 2, 3, 4, 5}
    with pytest.raises(ValueError):
        ClosureParams(0, 1)


@settings(max_examples=200, deadline=None)
@given(catalogs(), st.integers(4, 12), st.integers(0, 10 ** 6), st.integers(1, 3),
       st.integers(0, 2), st.integers(0, 2))
def test_iterates_compose(cat, n, seed, k, m1, m2):
    M = sample(CaseA(0.5), n, seed)
    X = {1, n}
    left = cl_km(M, cl_km(M, X, ClosureParams(k, m2), cat), ClosureParams(k, m1), cat)
    assert left == cl_km(M, X, ClosureParams(k, m1 + m2), cat)


@settings(max_examples=150, deadline=None)
@given(st.sampled_from([True, False]), st.integers(3, 10), st.integers(0, 10 ** 6),
       st.integers(1, 3), st.data())
def test_production_matches_brute_force(normalized, n, seed, k, data):
    cat = data.draw(catalogs(normalized=normalized))
    M = sample(CaseA(0.4), n, seed)
    X = data.draw(st.sets(st.integers(1, n), max_size=3))
    fast = cl_k(M, X, k, cat)
    assert fast == cl_k_bruteforce(M, X, k, cat)
    if not normalized:
        return
    # the materialized literal catalog gives the same closure
    assert fast == cl_k(M, X, k, materialize(cat, 3))


def test_anchored_path_matches_precomputed(monkeypatch):
    cat = ClosureCatalog.from_pairs([(K3, {1, 2}), (P3, {2})], 3, True)
    cases = []
    for seed in range(30):
        M = sample(CaseA(0.5), 11, seed)
        cases.append((M, {1, 6}, cl_k(M, {1, 6}, 3, cat)))
    monkeypatch.setattr(closure, "PRECOMPUTE_BOUND", 0)
    for M, X, expect in cases:
        assert cl_k(M, X, 3, cat) == expect


def test_graph_catalog_ignores_successor():
    cn = common_neighbor_catalog()
    M = Structure.from_edges(3, [(1, 2), (2, 3), (1, 3)], successor=True)
    assert cl_k(M, {1, 2}, 3, cn) == {1, 2, 3}


def test_successor_catalog():
    cat = successor_anchor_catalog()
    M = Structure.from_edges(5, [(2, 3), (3, 4), (2, 4)], successor=True)
    assert cl_k(M, set(), 3, cat) == {2, 3, 4}
    assert cl_k(Structure.from_edges(5, [(2, 3), (3, 4), (2, 4)]), set(), 3, cat) == set()


def test_is_algebraic_fixpoint():
    cn = common_neighbor_catalog()
    # a chain of triangles is reached one common neighbour at a time
    fan = Structure.from_edges(4, [(1, 2), (1, 3), (2, 3), (2, 4), (3, 4)])
    assert is_algebraic(cn, {1, 2}, fan)
    assert not is_algebraic(cn, {1, 4}, fan)
    assert not is_algebraic(common_neighbor_catalog(normalized=False), {1, 2}, fan)


# checkers --------------------------------------------------------------------


@settings(max_examples=60, deadline=None)
@given(catalogs(normalized=False), st.integers(2, 9), st.integers(0, 10 ** 6))
def test_extensive_for_any_catalog(cat, n, seed):
    M = sample(CaseA(0.5), n, seed)
    cX = cl_k(M, {1}, 3, cat)
    assert {1} <= cX <= set(M.vertices)


def test_monotone_exhaustive_small_graphs():
    cn = common_neighbor_catalog()
    for n in range(1, 6):
        for M in enumerate_structures(n):
            verts = list(M.vertices)
            for X in itertools.chain.from_iterable(
                    itertools.combinations(verts, r) for r in range(3)):
                cX = cl_k(M, X, 3, cn)
                for y in verts:
                    assert cX <= cl_k(M, set(X) | {y}, 3, cn)


def test_clause_c_nested():
    cat = ClosureCatalog.from_pairs([(K3, {1, 2}), (P3, {2})], 4, True)
    for seed in range(40):
        M = sample(CaseA(0.5), 9, seed)
        rep = check_axioms(cat, M, {1, 5}, {1, 5, 9}, 2, 3)
        assert rep.passed, rep.witnesses


def test_literal_catalog_can_fail_monotonicity():
    # only "path over one end" is listed; adding the other end changes the type
    cat = ClosureCatalog.from_pairs([(P3, {1})], 3, False)
    assert cl_k(P3, {1}, 3, cat) == {1, 2, 3}
    assert cl_k(P3, {1, 3}, 3, cat) == {1, 3}
    rep = check_axioms(cat, P3, {1}, {1, 3}, 3, 3)
    assert not rep.results["a"] and rep.witnesses["a"]
    assert check_axioms(cat.normalize(), P3, {1}, {1, 3}, 3, 3).passed


def test_containment_examples():
    cn = common_neighbor_catalog(k_max=9)
    M = sample(CaseA(0.3), 10, 1)
    assert check_iterate_containment(M, {1, 2}, 3, 1, cn)
    assert check_iterate_containment(M, {1, 2}, 3, 0, cn)
    assert check_iterate_containment(M, {1, 2}, 3, 2, cn)
    with pytest.raises(UnsupportedSize):
        check_iterate_containment(M, {1}, 3, 2, common_neighbor_catalog(k_max=3))


def test_check_local_examples():
    cn = common_neighbor_catalog()
    rep = check_local(cn, 3, K3, {1, 2})
    assert rep.passed
    assert rep.witnesses["Y"][3] == [1, 2, 3]
    assert rep.witnesses["Y"][1] == [1]
    assert check_local(empty_catalog(), 3, K3).passed


@settings(max_examples=60, deadline=None)
@given(catalogs(), st.integers(3, 9), st.integers(0, 10 ** 6))
def test_local_on_random_instances(cat, n, seed):
    M = sample(CaseA(0.4), n, seed)
    assert check_local(cat, 3, M, {1, 2}).passed


def test_transparency():
    assert check_transparent(empty_catalog(), 3)
    assert check_transparent(common_neighbor_catalog(), 3)
    # K3 over nothing, but no witness of size <= 2 exists for k = 2
    broken = ClosureCatalog.from_pairs([(K3, set())], 3, False)
    assert not check_transparent(broken, 2, r=3)
    assert check_transparent(broken, 3)


def test_smoothness_checker():
    cn = common_neighbor_catalog()
    N = Structure.from_edges(4, [(1, 2), (1, 3), (2, 3), (1, 4)])
    assert isinstance(check_smooth(cn, N, {1}, {1, 2, 3}, {1, 4}), bool)
    with pytest.raises(ValueError):
        check_smooth(cn, K3, {1}, {1, 2}, {1, 3})


# definability ------------------------------------------------------------------------


def test_defining_formula_examples():
    psi = closure_defining_formula(empty_catalog(), 3, 2)
    assert psi == disj([Eq("y", "x0"), Eq("y", "x1")])
    cn = common_neighbor_catalog()
    psi = closure_defining_formula(cn, 3, 2)
    assert free_vars(psi) == {"y", "x0", "x1"}
    for M in (K3, P3):
        for a in itertools.permutations(M.vertices, 2):
            expect = cl_k(M, set(a), 3, cn)
            for b in M.vertices:
                got = evaluate_naive(M, psi, {"y": b, "x0": a[0], "x1": a[1]})
                assert got == (b in expect)


@settings(max_examples=40, deadline=None)
@given(catalogs(), st.integers(2, 7), st.integers(0, 10 ** 6), st.integers(1, 2))
def test_defining_formula_matches_closure(cat, n, seed, l):
    M = sample(CaseA(0.4), n, seed)
    psi = closure_defining_formula(cat, 3, l)
    params = list(range(1, l + 1))
    cX = cl_k(M, set(params), 3, cat)
    asg = {f"x{i}": v for i, v in enumerate(params)}
    for b in M.vertices:
        assert evaluate_naive(M, psi, dict(asg, y=b)) == (b in cX)


def test_catalog_with_successor_sample():
    cat = successor_anchor_catalog()
    M = sample(CaseB(0.5), 12, 3)
    assert cl_k(M, set(), 3, cat) == cl_k_bruteforce(M, set(), 3, cat)
