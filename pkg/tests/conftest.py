import itertools

import pytest
from hypothesis import strategies as st

from zerolaw import kernels
from zerolaw.structures import Structure

BACKENDS = ["python"] + (["cython"] if kernels.compiled_available() else [])


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


@st.composite
def graphs(draw, min_n=0, max_n=7, successor=False):
    n = draw(st.integers(min_n, max_n))
    pairs = list(itertools.combinations(range(1, n + 1), 2))
    bits = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Structure.from_edges(n, [p for p, b in zip(pairs, bits) if b], successor=successor)


def brute_isomorphic(M1, M2, p1=(), p2=()):
    """Independent oracle: try every bijection."""
    if M1.n != M2.n or len(p1) != len(p2) or M1.has_successor != M2.has_successor:
        return False
    for perm in itertools.permutations(range(1, M2.n + 1)):
        f = dict(zip(range(1, M1.n + 1), perm))
        if any(f[a] != b for a, b in zip(p1, p2)):
            continue
        if all(M1.adjacent(i, j) == M2.adjacent(f[i], f[j])
               for i, j in itertools.combinations(M1.vertices, 2)):
            if not M1.has_successor or all(
                    M1.successor(i, j) == M2.successor(f[i], f[j])
                    for i in M1.vertices for j in M1.vertices if i != j):
                return True
    return False
