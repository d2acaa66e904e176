"""Edge-probability profiles, seeded sampling and exact first-moment formulas.

A profile maps a distance d = |i - j| to an edge probability.  Sampling is
counter based: the uniform attached to the pair {i, j} is a hash of
(stream key, i, j), and the stream key folds the user seed with the trial
index and n, so every sample is a pure function of its inputs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from . import kernels
from .errors import UnsupportedSize
from .structures import Structure

MASK64 = (1 << 64) - 1


# seeds ----------------------------------------------------------------------


def derive_key(seed, *path):
    """Fold a 64-bit seed and an integer path into a stream key."""
    h = kernels.mix64((int(seed) & MASK64) ^ 0x9E3779B97F4A7C15)
    for p in path:
        h = kernels.mix64(h ^ kernels.mix64((int(p) + 0x632BE59BD9B4E019) & MASK64))
    return h


@dataclass(frozen=True)
class Seed:
    value: int
    path: tuple = ()

    def child(self, *more):
        return Seed(self.value, self.path + tuple(more))

    def key(self, n):
        return derive_key(self.value, *self.path, n)


# profiles -------------------------------------------------------------------


def _check_alpha(alpha):
    if not (0.0 < alpha < 1.0):
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")


class EdgeProfile:
    """Base class; subclasses fill ``_raw(n)`` with probabilities by distance."""

    successor = False

    def probs(self, n):
        """Array of length max(n, 1); entry d is the probability at distance d
        (entry 0 is unused and set to 0)."""
        p = np.zeros(max(n, 1), dtype=np.float64)
        if n > 1:
            p[1:] = np.clip(self._raw(n)[1:n], 0.0, 1.0)
        return p

    def _raw(self, n):
        raise NotImplementedError

    def to_json_obj(self):
        raise NotImplementedError

    alpha = None


def _power_law(n, alpha):
    d = np.arange(max(n, 2), dtype=np.float64)
    d[0] = 1.0
    out = d ** (-alpha)
    out[0] = 0.0
    return out


@dataclass(frozen=True)
class CaseA(EdgeProfile):
    """p_d = d^-alpha for d > 1 and p_1 = p_2 = 2^-alpha."""

    alpha: float

    def __post_init__(self):
        _check_alpha(self.alpha)

    def _raw(self, n):
        out = _power_law(n, self.alpha)
        if n > 1:
            out[1] = 2.0 ** (-self.alpha)
        return out

    def to_json_obj(self):
        return {"variant": "caseA", "alpha": self.alpha}


@dataclass(frozen=True)
class CaseB(EdgeProfile):
    """p_d = d^-alpha for all d >= 1, structures carry the successor relation."""

    alpha: float
    successor = True

    def __post_init__(self):
        _check_alpha(self.alpha)

    def _raw(self, n):
        return _power_law(n, self.alpha)

    def to_json_obj(self):
        return {"variant": "caseB", "alpha": self.alpha}


@dataclass(frozen=True)
class SecondContext(EdgeProfile):
    """p_{i,j} = n^-alpha + 2^-|i-j|, clamped at 1."""

    alpha: float

    def __post_init__(self):
        _check_alpha(self.alpha)

    def _raw(self, n):
        d = np.arange(max(n, 2), dtype=np.float64)
        out = n ** (-self.alpha) + 2.0 ** (-d)
        out[0] = 0.0
        return out

    def clamped(self, n):
        """Distances at which the raw formula exceeds 1."""
        raw = self._raw(n)[1:n]
        return [int(d) + 1 for d in np.nonzero(raw > 1.0)[0]]

    def to_json_obj(self):
        return {"variant": "second", "alpha": self.alpha}


@dataclass(frozen=True)
class CustomSequence(EdgeProfile):
    """Explicit probabilities for distances 1, 2, ...; 0 beyond the list."""

    values: tuple
    successor: bool = False

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if any(not (0.0 <= v <= 1.0) for v in vals):
            raise ValueError("custom probabilities must lie in [0, 1]")
        object.__setattr__(self, "values", vals)

    def _raw(self, n):
        out = np.zeros(max(n, 2), dtype=np.float64)
        m = min(len(self.values), max(n - 1, 0))
        out[1:1 + m] = self.values[:m]
        return out

    def to_json_obj(self):
        return {"variant": "custom", "probs": list(self.values), "successor": self.successor}


@dataclass(frozen=True)
class Sparsified(EdgeProfile):
    """p'_{i_k} = p_k for increasing distances i_1 < i_2 < ..., 0 elsewhere."""

    base: EdgeProfile
    indices: tuple = field(default=())

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        if any(i < 1 for i in idx) or list(idx) != sorted(set(idx)):
            raise ValueError("indices must be strictly increasing positive distances")
        object.__setattr__(self, "indices", idx)

    @property
    def successor(self):
        return self.base.successor

    @property
    def alpha(self):
        return self.base.alpha

    def _raw(self, n):
        out = np.zeros(max(n, 2), dtype=np.float64)
        basep = self.base.probs(max(n, len(self.indices) + 1))
        for k, i in enumerate(self.indices, start=1):
            if i < n:
                out[i] = basep[k]
        return out

    def to_json_obj(self):
        return {"variant": "sparsified", "base": self.base.to_json_obj(),
                "indices": list(self.indices)}


def powers_of(b, n):
    """Distances b^0, b^1, ... below n (a sparse index set)."""
    out, x = [], 1
    while x < n:
        out.append(x)
        x *= b
    return out


def profile_from_json(obj):
    v = obj.get("variant")
    if v == "caseA":
        return CaseA(float(obj["alpha"]))
    if v == "caseB":
        return CaseB(float(obj["alpha"]))
    if v == "second":
        return SecondContext(float(obj["alpha"]))
    if v == "custom":
        return CustomSequence(tuple(obj["probs"]), bool(obj.get("successor", False)))
    if v == "sparsified":
        return Sparsified(profile_from_json(obj["base"]), tuple(obj["indices"]))
    raise ValueError(f"unknown profile variant {v!r}")


def near_rational(alpha, max_den=12, tol=1e-6):
    """The rational with denominator <= ``max_den`` within ``tol`` of alpha, if any."""
    q = Fraction(alpha).limit_denominator(max_den)
    return q if abs(float(q) - alpha) <= tol else None


# probabilities and sampling ---------------------------------------------------


def edge_probability(profile, n, i, j):
    for v in (i, j):
        if not (1 <= v <= n):
            raise ValueError(f"vertex {v} outside [1, {n}]")
    if i == j:
        return 0.0
    return float(profile.probs(n)[abs(i - j)])


def sample(profile, n, seed, path=(), backend=None):
    """Draw M_n.  ``seed`` is an int or a ``Seed``; ``path`` extends its stream."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if not isinstance(seed, Seed):
        seed = Seed(int(seed))
    key = seed.child(*path).key(n)
    adj = kernels.sample_adjacency(key, n, profile.probs(n), backend=backend)
    return Structure.from_dense(adj, successor=profile.successor)


def interval_embedding_probability(H, profile):
    """Probability that l -> offset + l embeds H, for a distance-only profile.

    ``profile`` may be a float alpha, read as case A.
    """
    if not isinstance(profile, EdgeProfile):
        profile = CaseA(float(profile))
    k = H.n
    p = profile.probs(max(k, 2))
    prob = 1.0
    for l in range(1, k + 1):
        for m in range(l + 1, k + 1):
            q = float(p[m - l])
            prob *= q if H.adjacent(l, m) else 1.0 - q
    return prob


class NoEmbeddingBound(NamedTuple):
    exact_aligned_miss: float
    uniform_bound: float
    beta: float

    @property
    def exp_neg_beta(self):
        return math.exp(-self.beta)


def no_embedding_bound(n, k, alpha):
    """Miss probability of K_k over the floor(n/k) disjoint aligned blocks.

    ``uniform_bound`` replaces every factor by the smallest one, (1/k^alpha);
    ``beta`` is the exponent of the exponential approximation n / k^(alpha C(k,2) + 1).
    """
    if not (2 <= k <= n):
        raise ValueError("need 2 <= k <= n")
    blocks = n // k
    c = k * (k - 1) // 2
    q = interval_embedding_probability(Structure.complete(k), CaseA(alpha))
    exact = (1.0 - q) ** blocks
    bound = (1.0 - k ** (-alpha * c)) ** blocks
    beta = n / k ** (alpha * c + 1)
    return NoEmbeddingBound(exact, bound, beta)


def threshold_k(n, alpha):
    if n < 2:
        raise ValueError("n must be at least 2")
    _check_alpha(alpha)
    # the tiny slack keeps exact squares such as sqrt(4 * 8) from rounding up
    return math.ceil(math.sqrt((2.0 / alpha) * math.log(n)) - 1e-12)


def expected_extensions(profile, n, placed_a, B):
    """Expected number of extensions of a fixed placement of A to B.

    A is the set of the first ``len(placed_a)`` vertices of B and vertex
    ``t`` of A sits at position ``placed_a[t - 1]``.  The sum runs over
    injective placements of the new vertices into the free positions.
    """
    s = len(placed_a)
    r = B.n - s
    if r < 0:
        raise ValueError("B must contain A")
    if r > 3:
        raise UnsupportedSize("expected_extensions handles at most 3 new vertices")
    if len(set(placed_a)) != s or any(not (1 <= x <= n) for x in placed_a):
        raise ValueError("placements must be distinct positions in [1, n]")
    if r == 0:
        return 1.0
    p = profile.probs(n)
    pos = np.arange(1, n + 1)
    succ = profile.successor and B.has_successor

    def factor(dist, edge, s_fw=None, s_bw=None, signed=None):
        d = np.abs(dist)
        f = np.where(d == 0, 0.0, p[np.minimum(d, n - 1)] if edge else 1.0 - p[np.minimum(d, n - 1)])
        if succ:
            # successor facts are determined by positions
            f = f * (((signed == 1) == bool(s_fw)) & ((signed == -1) == bool(s_bw)))
        return f

    def unary(j):
        v = np.ones(n)
        for a in range(1, s + 1):
            diff = pos - placed_a[a - 1]
            v *= factor(diff, B.adjacent(a, j), B.successor(a, j), B.successor(j, a), diff)
        return v

    def binary(j, l):
        diff = pos[None, :] - pos[:, None]
        return factor(diff, B.adjacent(j, l), B.successor(j, l), B.successor(l, j), diff)

    new = list(range(s + 1, B.n + 1))
    us = [unary(j) for j in new]
    if r == 1:
        return float(us[0].sum())
    if r == 2:
        return float(us[0] @ binary(new[0], new[1]) @ us[1])
    m01 = binary(new[0], new[1])
    m02 = binary(new[0], new[2])
    m12 = binary(new[1], new[2])
    total = 0.0
    for x in range(n):
        if us[0][x] == 0.0:
            continue
        inner = (us[1] * m01[x])[:, None] * (us[2] * m02[x])[None, :] * m12
        total += us[0][x] * inner.sum()
    return float(total)
