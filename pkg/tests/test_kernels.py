import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zerolaw import kernels
from zerolaw import _pykernels as py
from zerolaw.sampler import CaseA, CaseB, sample

needs_c = pytest.mark.skipif(not kernels.compiled_available(), reason="compiled kernels not built")


def test_mix64_known_value():
    # splitmix64 finalizer applied to 0 after one increment of the golden gamma
    assert py.mix64(0x9E3779B97F4A7C15) == 0xE220A8397B1DCDAF


def test_uniform_in_unit_interval():
    us = [py.pair_uniform(123, i, j) for i in range(1, 30) for j in range(i + 1, 30)]
    assert all(0.0 <= u < 1.0 for u in us)
    assert 0.4 < sum(us) / len(us) < 0.6


def test_adjacency_symmetric_and_matches_pair_uniform():
    probs = CaseA(0.5).probs(20)
    adj = py.sample_adjacency(77, 20, probs)
    assert np.array_equal(adj, adj.T) and not adj.diagonal().any()
    for i in range(1, 21):
        for j in range(i + 1, 21):
            assert bool(adj[i - 1, j - 1]) == (py.pair_uniform(77, i, j) < probs[j - i])


@needs_c
@settings(max_examples=40)
@given(st.integers(0, 2 ** 64 - 1), st.integers(1, 90))
def test_backends_sample_identically(key, n):
    probs = CaseA(0.37).probs(n)
    a = kernels.sample_adjacency(key, n, probs, backend="python")
    b = kernels.sample_adjacency(key, n, probs, backend="cython")
    assert np.array_equal(a, b)


@needs_c
def test_backends_pair_uniform_identical():
    for i, j in [(1, 2), (5, 900), (123456, 123457)]:
        assert kernels.pair_uniform(9, i, j, "python") == kernels.pair_uniform(9, i, j, "cython")


@needs_c
def test_sample_with_successor_both_backends():
    a = sample(CaseB(0.5), 40, 5, backend="python")
    b = sample(CaseB(0.5), 40, 5, backend="cython")
    assert a == b and a.is_full_successor()


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.sample_adjacency(1, 3, CaseA(0.5).probs(3), backend="fortran")
