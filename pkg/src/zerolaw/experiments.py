"""Monte Carlo harness: sentence probabilities across n, convergence
diagnostics, the empirical classifier for pair types, disjoint-family growth,
closure-size scans, simply-good checks and the empty-closure scan.

Every estimator is a deterministic function of its inputs and ``seed``.
Trial t at size n draws its structure from the stream (seed, t, n), and any
auxiliary randomness (placements, base sets) comes from a separate stream.
"""
from __future__ import annotations

import math
import statistics
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from itertools import combinations

import numpy as np

from . import kernels
from .closure import ClosureParams, cl_k, cl_km, is_algebraic
from .embeddings import (
    ExtensionQuery, count_extensions, enumerate_embeddings, enumerate_extensions,
    max_disjoint_family,
)
from .errors import UnsupportedSize
from .logic import Evaluator, free_vars, to_text
from .sampler import Seed, derive_key, sample
from .structures import (
    CANON_BOUND, PairType, PartialEmbedding, Structure, canonical_form, free_amalgam_check,
    is_embedding, pair_type, restrict,
)

AUX_SALT = 0xA5A5_0001
DEFAULT_GRID = (256, 512, 1024, 2048, 4096)


# parallel helper -----------------------------------------------------------------


def _map(fn, tasks, jobs):
    """Order-preserving map, in worker processes when ``jobs`` > 1."""
    if jobs is None or jobs <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))


def _chunks(trials, jobs):
    parts = max(1, min(trials, 4 * (jobs or 1)))
    step = -(-trials // parts)
    return [(lo, min(lo + step, trials)) for lo in range(0, trials, step)]


def aux_rng(seed, *path):
    return np.random.default_rng(derive_key(seed, AUX_SALT, *path))


# intervals ---------------------------------------------------------------------


def wilson_interval(successes, trials, level=0.95):
    if trials <= 0:
        raise ValueError("need at least one trial")
    if not (0 <= successes <= trials):
        raise ValueError("successes must lie in [0, trials]")
    z = statistics.NormalDist().inv_cdf(0.5 + level / 2)
    p = successes / trials
    denom = 1 + z * z / trials
    centre = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    lo, hi = max(0.0, centre - half), min(1.0, centre + half)
    # guard against rounding at the ends
    return min(lo, p), max(hi, p)


# sentence probabilities ------------------------------------------------------------


@dataclass(frozen=True)
class SeriesEntry:
    n: int
    trials: int
    successes: int
    phat: float
    ci_low: float
    ci_high: float


@dataclass
class EstimateSeries:
    entries: list
    profile: dict
    formula: str
    seed: int
    level: float = 0.95

    def phats(self):
        return [e.phat for e in self.entries]

    def ns(self):
        return [e.n for e in self.entries]


def _count_successes(task):
    phi, profile, n, seed, lo, hi = task
    ev = Evaluator(phi)
    base = Seed(seed)
    return sum(1 for t in range(lo, hi) if ev(sample(profile, n, base, (t,))))


def estimate_prob(phi, profile, n, trials, seed, level=0.95, jobs=1):
    if free_vars(phi):
        raise ValueError(f"not a sentence: free variables {sorted(free_vars(phi))}")
    if trials < 1:
        raise ValueError("need at least one trial")
    tasks = [(phi, profile, n, seed, lo, hi) for lo, hi in _chunks(trials, jobs)]
    succ = sum(_map(_count_successes, tasks, jobs))
    lo, hi = wilson_interval(succ, trials, level)
    return SeriesEntry(n, trials, succ, succ / trials, lo, hi)


def prob_series(phi, profile, ngrid, trials, seed, level=0.95, jobs=1):
    entries = [estimate_prob(phi, profile, n, trials, seed, level, jobs) for n in ngrid]
    return EstimateSeries(entries, profile.to_json_obj(), to_text(phi), seed, level)


def edge_frequency_by_distance(profile, n, trials, seed, distances):
    """Fraction of (trial, pair) draws that are edges, per distance."""
    hits = {d: 0 for d in distances}
    base = Seed(seed)
    probs = profile.probs(n)
    for t in range(trials):
        adj = kernels.sample_adjacency(base.child(t).key(n), n, probs)
        for d in distances:
            hits[d] += int(np.trace(adj, offset=d))
    return {d: hits[d] / (trials * (n - d)) for d in distances}


def aligned_embedding_frequency(H, profile, n, offset, trials, seed):
    """Fraction of trials in which l -> offset + l - 1 embeds H into M_n.

    Only the pairs inside the block are drawn, from the same streams that
    ``sample`` uses, so the result equals the full-sample frequency.
    """
    if offset < 1 or offset + H.n - 1 > n:
        raise ValueError("block does not fit")
    probs = profile.probs(n)
    base = Seed(seed)
    pairs = [(l, m) for l in range(1, H.n + 1) for m in range(l + 1, H.n + 1)]
    hits = 0
    for t in range(trials):
        key = base.child(t).key(n)
        ok = True
        for l, m in pairs:
            edge = kernels.pair_uniform(key, offset + l - 1, offset + m - 1) < probs[m - l]
            if edge != H.adjacent(l, m):
                ok = False
                break
        hits += ok
    return hits / trials, hits


# convergence diagnostics ---------------------------------------------------------------


@dataclass(frozen=True)
class ConvergenceVerdict:
    verdict: str
    tail_mean: float
    max_adjacent_gap: float
    max_window_gap: float
    thresholds: dict


def convergence_diagnostics(series, window=None, delta=0.05, tau=0.05):
    """Classify a probability series.

    * zero-one-like: the mean of the last third is within ``delta`` of 0 or 1;
    * oscillating: two consecutive late gaps exceed ``tau`` beyond their
      interval noise and alternate in sign;
    * convergent-like: every late gap is below ``tau`` plus its interval noise;
    * otherwise inconclusive.

    ``window`` is h(n) for the windowed gap max |p(n+k) - p(n+l)|, k, l <= h(n),
    taken over grid points (default h(n) = n).
    """
    entries = series.entries if isinstance(series, EstimateSeries) else list(series)
    if len(entries) < 4:
        raise ValueError("need at least 4 points")
    window = window or (lambda n: n)
    p = [e.phat for e in entries]
    half = [(e.ci_high - e.ci_low) / 2 for e in entries]
    tail = p[-max(1, math.ceil(len(p) / 3)):]
    tail_mean = sum(tail) / len(tail)
    gaps = [p[i + 1] - p[i] for i in range(len(p) - 1)]
    noise = [half[i] + half[i + 1] for i in range(len(gaps))]
    late = list(range(len(gaps)))[-max(2, math.ceil(len(gaps) / 2)):]
    signif = {i: abs(gaps[i]) > tau + noise[i] for i in late}
    max_gap = max(abs(g) for g in gaps)
    wgap = 0.0
    ns = [e.n for e in entries]
    for i, n in enumerate(ns):
        inside = [p[j] for j in range(len(ns)) if n <= ns[j] <= n + window(n)]
        wgap = max(wgap, max(inside) - min(inside))
    if tail_mean <= delta or tail_mean >= 1 - delta:
        verdict = "zero-one-like"
    elif any(signif[i] and signif[j] and gaps[i] * gaps[j] < 0 for i, j in zip(late, late[1:])):
        verdict = "oscillating"
    elif all(abs(gaps[i]) <= tau + noise[i] for i in late):
        verdict = "convergent-like"
    else:
        verdict = "inconclusive"
    return ConvergenceVerdict(verdict, tail_mean, max_gap, wgap,
                              {"delta": delta, "tau": tau, "tail_fraction": 1 / 3})


# growth functions and placements -----------------------------------------------------


@dataclass(frozen=True)
class GrowthFunction:
    """h(n, eps); ``power`` is n^eps, ``polylog`` is (log n)^(1/eps)."""

    kind: str = "power"

    def __call__(self, n, eps):
        if self.kind == "power":
            return n ** eps
        if self.kind == "polylog":
            return math.log(n) ** (1.0 / eps)
        raise ValueError(f"unknown growth function {self.kind!r}")

    def transitive(self, eps1, ns=(10, 100, 10**4, 10**8)):
        """h(n, eps1/2)^2 <= h(n, eps1) at every tested n."""
        eps2 = eps1 / 2
        return all(self(n, eps2) ** 2 <= self(n, eps1) * (1 + 1e-12) for n in ns)


PLACEMENTS = ("stratified", "consecutive", "random", "grid")


@dataclass(frozen=True)
class Placement:
    """How base embeddings f0 of A are chosen inside M_n.

    ``consecutive`` puts A on a centred block of consecutive positions,
    ``stratified`` adds one random block per stratum of [1, n], ``grid`` uses
    evenly spaced blocks and ``random`` arbitrary distinct positions.
    """

    policy: str = "stratified"
    count: int = 16

    def __post_init__(self):
        if self.policy not in PLACEMENTS:
            raise ValueError(f"unknown placement policy {self.policy!r}")

    def positions(self, n, a, rng):
        if a == 0:
            return [()]
        if a > n:
            return []
        span = n - a + 1
        centre = (n - a) // 2 + 1
        block = lambda o: tuple(range(o, o + a))
        if self.policy == "consecutive":
            return [block(centre)]
        if self.policy == "grid":
            offs = sorted({1 + (s * (span - 1)) // max(1, self.count - 1) for s in range(self.count)})
            return [block(o) for o in offs]
        if self.policy == "stratified":
            out = [block(centre)]
            for s in range(self.count):
                lo = 1 + (s * span) // self.count
                hi = max(lo, ((s + 1) * span) // self.count)
                out.append(block(int(rng.integers(lo, hi + 1))))
            return out
        return [tuple(int(x) + 1 for x in rng.choice(n, size=a, replace=False))
                for _ in range(self.count)]


def _as_pair(pair):
    """(B, A-set) from a PairType or a (B, A) tuple; A becomes 1..|A| of B."""
    if isinstance(pair, PairType):
        return pair.realize()
    B, A = pair
    A = frozenset(A)
    order = sorted(A) + [v for v in B.vertices if v not in A]
    pos = {v: i + 1 for i, v in enumerate(order)}
    B2 = Structure.from_edges(B.n, [(pos[i], pos[j]) for i, j in B.edges()],
                              successor=[(pos[i], pos[j]) for i, j in B.succ_pairs()]
                              if B.has_successor else False)
    return B2, frozenset(range(1, len(A) + 1))


def _base_maps(M, B, A, placement, rng):
    """Base embeddings of A (as vertices 1..|A| of B) under the placement policy."""
    a = len(A)
    A_sub = restrict(B, A).structure
    out = []
    for pos in placement.positions(M.n, a, rng):
        f = {i + 1: p for i, p in enumerate(pos)}
        if is_embedding(f, A_sub, M):
            out.append(PartialEmbedding.of(f))
    return out


def _fit_slope(ns, values):
    """OLS slope of log(max(v, 1)) on log n, with its standard error."""
    x = np.log(np.asarray(ns, dtype=float))
    y = np.log(np.maximum(np.asarray(values, dtype=float), 1.0))
    if len(set(ns)) < 2:
        raise ValueError("degenerate grid: need two distinct sizes")
    xm = x - x.mean()
    sxx = float((xm ** 2).sum())
    slope = float((xm * (y - y.mean())).sum() / sxx)
    resid = y - y.mean() - slope * xm
    dof = len(x) - 2
    se = float(math.sqrt((resid ** 2).sum() / dof / sxx)) if dof > 0 else float("nan")
    return slope, se


def _aggregate(values, how):
    if how == "median":
        return float(statistics.median(values))
    if how == "max":
        return float(max(values))
    if how == "mean":
        return float(sum(values) / len(values))
    raise ValueError(f"unknown aggregate {how!r}")


def _check_grid(ngrid, B):
    ngrid = list(ngrid)
    if len(set(ngrid)) < 2:
        raise ValueError("degenerate grid: need two distinct sizes")
    if min(ngrid) < max(B.n, 1):
        raise ValueError("grid sizes must be at least |B|")
    return ngrid


# the classifier -----------------------------------------------------------------------


@dataclass
class ClassificationReport:
    pair: str
    a_size: int
    b_size: int
    placement: str
    profile: dict
    ngrid: list
    trials: int
    seed: int
    per_n: list  # per n: list of per-sample maxima over placements
    aggregate: str
    aggregated: list
    slope: float
    slope_se: float
    growth: str
    eps_lo: float
    eps_hi: float
    verdict: str

    def to_json_obj(self):
        return asdict(self)


def _per_sample_counts(task):
    B, A, profile, n, seed, lo, hi, placement, mode = task
    out = []
    for t in range(lo, hi):
        M = sample(profile, n, Seed(seed), (t,))
        rng = aux_rng(seed, n, t)
        best = 0
        for f0 in _base_maps(M, B, A, placement, rng):
            q = ExtensionQuery(M, f0, B)
            if mode == "count":
                c = int(count_extensions(q))
            else:
                c = len(max_disjoint_family(q))
            best = max(best, c)
        out.append(best)
    return out


def _scan_counts(B, A, profile, ngrid, trials, seed, placement, mode, jobs):
    per_n = []
    for n in ngrid:
        tasks = [(B, A, profile, n, seed, lo, hi, placement, mode)
                 for lo, hi in _chunks(trials, jobs)]
        vals = [v for chunk in _map(_per_sample_counts, tasks, jobs) for v in chunk]
        per_n.append(vals)
    return per_n


def classify_pair(pair, profile, ngrid=DEFAULT_GRID, trials=30, seed=0, placement=None,
                  eps_lo=0.15, eps_hi=0.3, aggregate="median", growth=None, jobs=1):
    """Empirical <=_i / <=_s verdict from the growth of extension counts.

    For each n and sample, the count is maximised over the placed base
    embeddings; samples are aggregated (median by default) and the slope of
    log count against log n decides: i-like below ``eps_lo``, s-like above
    ``eps_hi``, inconclusive between.
    """
    B, A = _as_pair(pair)
    if B.n - len(A) > 3:
        raise UnsupportedSize("classification handles at most 3 new vertices")
    ngrid = _check_grid(ngrid, B)
    placement = placement or Placement()
    growth = growth or GrowthFunction()
    per_n = _scan_counts(B, A, profile, ngrid, trials, seed, placement, "count", jobs)
    agg = [_aggregate(v, aggregate) for v in per_n]
    slope, se = _fit_slope(ngrid, agg)
    if slope < eps_lo:
        verdict = "i-like"
    elif slope > eps_hi:
        verdict = "s-like"
    else:
        verdict = "inconclusive"
    return ClassificationReport(
        pair_type(A, B).code, len(A), B.n, placement.policy, profile.to_json_obj(), ngrid,
        trials, seed, per_n, aggregate, agg, slope, se, growth.kind, eps_lo, eps_hi, verdict)


@dataclass
class GrowthReport:
    pair: str
    placement: str
    profile: dict
    ngrid: list
    trials: int
    seed: int
    per_n: list
    aggregated: list
    slope: float
    slope_se: float

    def to_json_obj(self):
        return asdict(self)


def weakly_nice_scan(pair, profile, ngrid=DEFAULT_GRID, trials=30, seed=0, placement=None,
                     aggregate="median", jobs=1):
    """Growth of greedy pairwise-disjoint extension families."""
    B, A = _as_pair(pair)
    if B.n - len(A) > 3:
        raise UnsupportedSize("the scan handles at most 3 new vertices")
    ngrid = _check_grid(ngrid, B)
    placement = placement or Placement()
    per_n = _scan_counts(B, A, profile, ngrid, trials, seed, placement, "family", jobs)
    agg = [_aggregate(v, aggregate) for v in per_n]
    slope, se = _fit_slope(ngrid, agg)
    return GrowthReport(pair_type(A, B).code, placement.policy, profile.to_json_obj(), ngrid,
                        trials, seed, per_n, agg, slope, se)


# closure scans ---------------------------------------------------------------------------


@dataclass
class ClosureScanReport:
    profile: dict
    k: int
    m: int
    l: int
    eps: float
    ngrid: list
    trials: int
    seed: int
    max_size: list
    violation_fraction: list

    def to_json_obj(self):
        return asdict(self)


def _closure_sizes(task):
    profile, cat, k, m, l, n, seed, lo, hi = task
    out = []
    for t in range(lo, hi):
        M = sample(profile, n, Seed(seed), (t,))
        rng = aux_rng(seed, n, t, 1)
        X = {int(v) + 1 for v in rng.choice(n, size=min(l, n), replace=False)}
        out.append(len(cl_km(M, X, ClosureParams(k, m), cat)))
    return out


def closure_size_scan(profile, cat, k, m, l, eps, ngrid, trials, seed, jobs=1):
    """Per n: the largest |cl^{k,m}(X)| over random l-sets X, and the fraction
    of trials with |cl^{k,m}(X)| >= n^eps."""
    sizes_max, viol = [], []
    for n in ngrid:
        tasks = [(profile, cat, k, m, l, n, seed, lo, hi) for lo, hi in _chunks(trials, jobs)]
        sizes = [s for chunk in _map(_closure_sizes, tasks, jobs) for s in chunk]
        sizes_max.append(max(sizes))
        viol.append(sum(1 for s in sizes if s >= n ** eps) / len(sizes))
    return ClosureScanReport(profile.to_json_obj(), k, m, l, eps, list(ngrid), trials, seed,
                             sizes_max, viol)


# simply good -----------------------------------------------------------------------------


@dataclass
class SimplyGoodReport:
    fraction: float
    tested: int
    satisfied: int
    witnesses: list

    def to_json_obj(self):
        return asdict(self)


def simply_good_check(N, B, B0, B1, k, cat, profile, n, trials, seed, bases_per_sample=4,
                      extension_limit=5000):
    """Fraction of sampled (M_n, f: N|B -> M_n) admitting g: N -> M_n extending f with

    (i) g(N) ∩ cl^k(f(B)) = f(B), (ii) g(N) free from cl^k(f(B)) over f(B),
    (iii) cl^k(g(B0)) ⊆ g(B1) ∪ cl^k(g(B)).
    """
    B, B0, B1 = frozenset(B), frozenset(B0), frozenset(B1)
    verts = frozenset(N.vertices)
    if not (B <= verts and B0 <= verts and B1 <= verts):
        raise ValueError("B, B0 and B1 must be vertex sets of N")
    if N.n > 8:
        raise UnsupportedSize("simply_good_check handles |N| <= 8")
    order = sorted(B) + sorted(verts - B)
    relabel = {v: i + 1 for i, v in enumerate(order)}
    Nr, _ = _as_pair((N, B))
    b = len(B)
    B0r = {relabel[v] for v in B0}
    B1r = {relabel[v] for v in B1}
    Bsub = restrict(Nr, range(1, b + 1)).structure
    tested = satisfied = 0
    witnesses = []
    for t in range(trials):
        M = sample(profile, n, Seed(seed), (t,))
        rng = aux_rng(seed, n, t, 2)
        fs = _random_embeddings(Bsub, M, bases_per_sample, rng)
        for f in fs:
            tested += 1
            fB = f.range
            clB = cl_k(M, fB, k, cat)
            q = ExtensionQuery(M, f, Nr, extension_limit)
            for g in enumerate_extensions(q):
                gm = g.mapping
                gN = g.range
                if gN & clB != fB:
                    continue
                if not free_amalgam_check(M, fB, gN, clB):
                    continue
                left = cl_k(M, {gm[v] for v in B0r}, k, cat)
                if not left <= ({gm[v] for v in B1r} | clB):
                    continue
                satisfied += 1
                if len(witnesses) < 5:
                    witnesses.append({"trial": t, "f": dict(f.pairs), "g": dict(g.pairs)})
                break
    frac = satisfied / tested if tested else float("nan")
    return SimplyGoodReport(frac, tested, satisfied, witnesses)


def _random_embeddings(H, M, count, rng):
    if H.n == 0:
        return [PartialEmbedding(())]
    found = enumerate_embeddings(H, M, limit=2000)
    if not found:
        return []
    idx = rng.choice(len(found), size=min(count, len(found)), replace=False)
    return [found[int(i)] for i in sorted(idx)]


# local relations -------------------------------------------------------------------------


def local_relation_check(A, B, m, k, cat):
    """(A <=^s_m B, A <=^i_{k,m} B) under the catalog semantics.

    s: every X ⊆ B with |X| <= m has no C, A∩X < C ⊆ X, with A∩X <=_i C.
    i: every X ⊆ B with |X| <= k lies in some Y ⊆ B, |Y| <= m, with A∩Y <=_i Y.
    """
    A = frozenset(A)
    if B.n > 8:
        raise UnsupportedSize("local_relation_check handles |B| <= 8")
    verts = list(B.vertices)

    def alg(base, top):
        sub, labels = restrict(B, top)
        inv = {v: i + 1 for i, v in enumerate(labels)}
        return is_algebraic(cat, {inv[v] for v in base}, sub)

    s_ok = True
    for size in range(0, min(m, B.n) + 1):
        for X in combinations(verts, size):
            X = frozenset(X)
            base = A & X
            rest = sorted(X - base)
            for r in range(1, len(rest) + 1):
                for extra in combinations(rest, r):
                    if alg(base, base | set(extra)):
                        s_ok = False
                        break
                if not s_ok:
                    break
            if not s_ok:
                break
        if not s_ok:
            break

    i_ok = True
    for size in range(0, min(k, B.n) + 1):
        for X in combinations(verts, size):
            X = frozenset(X)
            others = [v for v in verts if v not in X]
            found = False
            for r in range(0, max(0, m - len(X)) + 1):
                for extra in combinations(others, r):
                    Y = X | set(extra)
                    if alg(A & Y, Y):
                        found = True
                        break
                if found:
                    break
            if not found:
                i_ok = False
                break
        if not i_ok:
            break
    return s_ok, i_ok


# the empty-closure scan ---------------------------------------------------------------------


def _closure_key(S):
    if S.n <= CANON_BOUND:
        return str(canonical_form(S))
    return f"large:{S.n}:{S.edge_count()}"


def _empty_closure_types(task):
    profile, cat, k, m, n, seed, lo, hi = task
    out = []
    for t in range(lo, hi):
        M = sample(profile, n, Seed(seed), (t,))
        C = cl_km(M, (), ClosureParams(k, m), cat)
        out.append(_closure_key(restrict(M, C).structure))
    return out


@dataclass
class EmptyClosureReport:
    profile: dict
    k: int
    m: int
    ngrid: list
    trials: int
    seed: int
    histograms: list  # per n: {canonical code: fraction}

    def to_json_obj(self):
        return asdict(self)


def empty_closure_scan(profile, cat, k, m, ngrid, trials, seed, jobs=1):
    """Distribution of isomorphism types of M_n restricted to cl^{k,m}(∅)."""
    hists = []
    for n in ngrid:
        tasks = [(profile, cat, k, m, n, seed, lo, hi) for lo, hi in _chunks(trials, jobs)]
        keys = [x for chunk in _map(_empty_closure_types, tasks, jobs) for x in chunk]
        counts = Counter(keys)
        hists.append({key: counts[key] / trials for key in sorted(counts)})
    return EmptyClosureReport(profile.to_json_obj(), k, m, list(ngrid), trials, seed, hists)
