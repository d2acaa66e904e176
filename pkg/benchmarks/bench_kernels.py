"""Compare the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Both backends must produce identical outputs; the script checks that before
reporting timings.
"""
import argparse
import time

import numpy as np

from zerolaw import kernels
from zerolaw.embeddings import count_embeddings
from zerolaw.sampler import CaseA, Seed, sample
from zerolaw.structures import Structure


def best_of(fn, repeat):
    times = []
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def bench_sampling(n, repeat):
    probs = CaseA(0.5).probs(n)
    key = Seed(7).key(n)
    rows = {}
    for backend in ("python", "cython"):
        rows[backend] = best_of(lambda: kernels.sample_adjacency(key, n, probs, backend), repeat)
    assert np.array_equal(rows["python"][1], rows["cython"][1]), "backends disagree"
    return {b: t for b, (t, _) in rows.items()}


def bench_search(n, repeat):
    M = sample(CaseA(0.5), n, 11)
    H = Structure.complete(3)
    rows = {}
    for backend in ("python", "cython"):
        rows[backend] = best_of(lambda: int(count_embeddings(H, M, backend=backend)), repeat)
    assert rows["python"][1] == rows["cython"][1], "backends disagree"
    return {b: t for b, (t, _) in rows.items()}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if not kernels.compiled_available():
        raise SystemExit("compiled kernels are not built; run pip install -e . first")
    print(f"{'kernel':<10} {'n':>6} {'python s':>10} {'cython s':>10} {'speedup':>8}")
    for name, fn, sizes in (("sample", bench_sampling, (256, 1024, 2048)),
                            ("search", bench_search, (64, 128, 256))):
        for n in sizes:
            t = fn(n, args.repeat)
            print(f"{name:<10} {n:>6} {t['python']:>10.4f} {t['cython']:>10.4f} "
                  f"{t['python'] / t['cython']:>8.1f}")


if __name__ == "__main__":
    main()
