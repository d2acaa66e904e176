import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zerolaw.errors import UnsupportedSize
from zerolaw.sampler import (
    CaseA, CaseB, CustomSequence, SecondContext, Seed, Sparsified, derive_key, edge_probability,
    expected_extensions, interval_embedding_probability, near_rational, no_embedding_bound,
    powers_of, profile_from_json, sample, threshold_k,
)
from zerolaw.structures import Structure

alphas = st.floats(0.01, 0.99)


def test_case_a_values():
    assert edge_probability(CaseA(0.5), 10, 1, 5) == pytest.approx(0.5)
    assert edge_probability(CaseA(0.3), 10, 4, 5) == pytest.approx(2 ** -0.3)
    assert edge_probability(CaseA(0.3), 10, 4, 6) == pytest.approx(2 ** -0.3)
    assert edge_probability(CaseA(0.3), 10, 3, 3) == 0.0
    with pytest.raises(ValueError):
        edge_probability(CaseA(0.3), 10, 0, 3)


def test_case_b_uses_plain_power_law():
    p = CaseB(0.5).probs(10)
    assert p[1] == pytest.approx(1.0) and p[4] == pytest.approx(0.5)
    assert sample(CaseB(0.5), 5, 0).is_full_successor()


def test_second_context():
    assert edge_probability(SecondContext(0.5), 16, 1, 3) == pytest.approx(0.5)
    # 1/2^0.5 + 1/2 > 1, so the value is clamped
    assert edge_probability(SecondContext(0.5), 2, 1, 2) == 1.0
    assert SecondContext(0.5).clamped(2)


def test_custom_and_sparsified():
    p = CustomSequence((0.2, 0.7)).probs(6)
    assert list(p) == [0.0, 0.2, 0.7, 0.0, 0.0, 0.0]
    sp = Sparsified(CaseA(0.5), (1, 3, 9)).probs(12)
    base = CaseA(0.5).probs(12)
    assert sp[1] == base[1] and sp[3] == base[2] and sp[9] == base[3]
    assert sp[2] == 0 and sp[4] == 0
    assert powers_of(3, 30) == [1, 3, 9, 27]
    with pytest.raises(ValueError):
        Sparsified(CaseA(0.5), (3, 1))
    with pytest.raises(ValueError):
        CustomSequence((1.5,))


@pytest.mark.parametrize("prof", [CaseA(0.4), CaseB(0.6), SecondContext(0.2),
                                  CustomSequence((0.1, 0.9), True),
                                  Sparsified(CaseB(0.3), (1, 2, 4))])
def test_profile_json_round_trip(prof):
    assert profile_from_json(prof.to_json_obj()) == prof


@given(alphas, st.integers(1, 300))
def test_probabilities_in_unit_interval(alpha, n):
    for prof in (CaseA(alpha), CaseB(alpha), SecondContext(alpha)):
        p = prof.probs(n)
        assert np.all(p >= 0) and np.all(p <= 1) and p[0] == 0


def test_alpha_range_checked():
    for bad in (0.0, 1.0, -0.1):
        with pytest.raises(ValueError):
            CaseA(bad)


def test_sample_examples():
    M = sample(CaseA(0.5), 1, 3)
    assert M.n == 1 and M.edge_count() == 0
    assert sample(CaseA(0.5), 32, 9) == sample(CaseA(0.5), 32, 9)
    assert sample(CaseA(0.5), 32, 9) != sample(CaseA(0.5), 32, 10)


@settings(max_examples=30)
@given(st.integers(0, 2 ** 63), st.integers(1, 40), st.integers(0, 5))
def test_sample_deterministic(seed, n, t):
    a = sample(CaseA(0.5), n, Seed(seed), (t,))
    b = sample(CaseA(0.5), n, Seed(seed).child(t))
    assert a == b
    a.check_invariants()


def test_derive_key_separates_paths():
    keys = {derive_key(1, t, n) for t in range(20) for n in range(2, 20)}
    assert len(keys) == 20 * 18


def test_interval_embedding_examples():
    assert interval_embedding_probability(Structure.complete(2), 0.5) == pytest.approx(2 ** -0.5)
    assert interval_embedding_probability(Structure.complete(3), 0.5) == pytest.approx(2 ** -1.5)
    assert interval_embedding_probability(Structure.empty(2), 0.5) == pytest.approx(1 - 2 ** -0.5)


@given(alphas, st.integers(2, 7))
def test_interval_embedding_matches_direct_product(alpha, k):
    H = Structure.path(k)
    p = lambda d: 2 ** -alpha if d <= 2 else d ** -alpha
    expect = 1.0
    for l, m in itertools.combinations(range(1, k + 1), 2):
        expect *= p(m - l) if m - l == 1 else 1 - p(m - l)
    assert interval_embedding_probability(H, alpha) == pytest.approx(expect)


def test_no_embedding_bound_examples():
    r = no_embedding_bound(8, 2, 0.5)
    assert r.uniform_bound == pytest.approx((1 - 2 ** -0.5) ** 4)
    assert r.uniform_bound == pytest.approx(0.0073593, abs=1e-6)
    assert r.exact_aligned_miss == pytest.approx(r.uniform_bound)
    r = no_embedding_bound(30, 3, 0.5)
    assert r.exact_aligned_miss == pytest.approx((1 - 2 ** -1.5) ** 10)
    assert r.exact_aligned_miss == pytest.approx(0.012740, abs=1e-5)
    assert r.uniform_bound == pytest.approx((1 - 3 ** -1.5) ** 10)
    assert r.uniform_bound == pytest.approx(0.117949, abs=1e-5)
    assert r.beta == pytest.approx(30 / 3 ** 2.5)
    with pytest.raises(ValueError):
        no_embedding_bound(3, 4, 0.5)


@given(st.integers(2, 200), st.integers(2, 8), alphas)
def test_exact_miss_below_bound(n, k, alpha):
    if k > n:
        return
    r = no_embedding_bound(n, k, alpha)
    assert r.exact_aligned_miss <= r.uniform_bound + 1e-15


def test_threshold_k():
    assert threshold_k(math.e, 0.5) == 2
    assert threshold_k(math.e ** 8, 0.5) == 6


@given(alphas, st.integers(2, 10 ** 6), st.integers(2, 10 ** 6))
def test_threshold_k_monotone(alpha, n1, n2):
    lo, hi = sorted((n1, n2))
    assert threshold_k(lo, alpha) <= threshold_k(hi, alpha)


def test_near_rational():
    assert near_rational(0.5) == 0.5
    assert near_rational(1 / 3 + 1e-8) is not None
    assert near_rational(math.sqrt(2) - 1) is None


def brute_expected(profile, n, placed, B):
    """Independent oracle: enumerate placements with itertools."""
    s = len(placed)
    new = list(range(s + 1, B.n + 1))
    free = [x for x in range(1, n + 1) if x not in placed]
    pos = {a: placed[a - 1] for a in range(1, s + 1)}
    total = 0.0
    for choice in itertools.permutations(free, len(new)):
        where = dict(pos)
        where.update(zip(new, choice))
        prob = 1.0
        for u, v in itertools.combinations(range(1, B.n + 1), 2):
            if u <= s and v <= s:
                continue
            q = edge_probability(profile, n, where[u], where[v])
            prob *= q if B.adjacent(u, v) else 1 - q
        total += prob
    return total


def test_expected_extensions_examples():
    assert expected_extensions(CaseA(0.5), 10, (3,), Structure.empty(1)) == 1.0
    pend = Structure.complete(2)
    assert expected_extensions(CaseA(0.5), 3, (1,), pend) == pytest.approx(2 * 2 ** -0.5)
    with pytest.raises(UnsupportedSize):
        expected_extensions(CaseA(0.5), 10, (), Structure.empty(4))


@settings(max_examples=40)
@given(alphas, st.integers(4, 9), st.data())
def test_expected_extensions_matches_enumeration(alpha, n, data):
    s = data.draw(st.integers(0, 2))
    r = data.draw(st.integers(1, 2))
    pairs = list(itertools.combinations(range(1, s + r + 1), 2))
    bits = data.draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    B = Structure.from_edges(s + r, [p for p, b in zip(pairs, bits) if b])
    placed = tuple(data.draw(st.permutations(range(1, n + 1)))[:s])
    prof = CaseA(alpha)
    assert expected_extensions(prof, n, placed, B) == pytest.approx(
        brute_expected(prof, n, placed, B), rel=1e-9, abs=1e-12)


def test_expected_extensions_three_new_vertices():
    B = Structure.from_edges(4, [(1, 2), (2, 3), (3, 4)])
    assert expected_extensions(CaseA(0.4), 7, (2,), B) == pytest.approx(
        brute_expected(CaseA(0.4), 7, (2,), B))


def test_common_neighbour_growth_follows_exponent():
    cn = Structure.complete(3)
    def growth(alpha):
        e = [expected_extensions(CaseA(alpha), n, (n // 2, n // 2 + 1), cn) for n in (1000, 4000)]
        return math.log(e[1] / e[0]) / math.log(4)
    assert growth(0.3) == pytest.approx(0.4, abs=0.08)
    assert growth(0.8) < 0.05
