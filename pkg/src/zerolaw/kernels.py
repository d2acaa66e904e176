"""Backend selection for the hot kernels.

The compiled extension is used when it imports; set ``ZEROLAW_PURE=1`` to force
the pure-Python fallback.  ``BACKEND`` names the active one.
"""
import os

from . import _pykernels as py

MODE_COUNT = py.MODE_COUNT
MODE_ENUM = py.MODE_ENUM
MODE_GREEDY = py.MODE_GREEDY
ANCHOR_NONE = py.ANCHOR_NONE
ANCHOR_E = py.ANCHOR_E
ANCHOR_S_OUT = py.ANCHOR_S_OUT
ANCHOR_S_IN = py.ANCHOR_S_IN

mix64 = py.mix64

_c = None
if not os.environ.get("ZEROLAW_PURE"):
    try:
        from . import _ckernels as _c
    except ImportError:  # pragma: no cover - depends on the build
        _c = None

BACKEND = "cython" if _c is not None else "python"


def compiled_available():
    return _c is not None


def sample_adjacency(key, n, probs, backend=None):
    import numpy as np

    probs = np.ascontiguousarray(probs, dtype=np.float64)
    if _use_c(backend):
        return _c.sample_adjacency(key, n, probs)
    return py.sample_adjacency(key, n, probs)


def pair_uniform(key, i, j, backend=None):
    if _use_c(backend):
        return _c.pair_uniform(key, i, j)
    return py.pair_uniform(key, i, j)


def search(target, pat_adj, pat_succ, image, order, anchors, anchor_kinds, mode, limit,
           backend=None):
    """Dispatch an embedding search on a ``Structure`` target."""
    if _use_c(backend):
        succ = target.dense_succ() if target.has_successor else None
        return _c.search(target.dense(), succ, target.n, pat_adj, pat_succ, image, order,
                         anchors, anchor_kinds, mode, limit)
    so = target.succ_rows if target.has_successor else None
    si = target.pred_rows if target.has_successor else None
    return py.search(target.rows, so, si, target.n, pat_adj, pat_succ, image, order,
                     anchors, anchor_kinds, mode, limit)


def _use_c(backend):
    if backend is None:
        return _c is not None
    if backend == "cython":
        if _c is None:
            raise RuntimeError("compiled kernels are not built")
        return True
    if backend == "python":
        return False
    raise ValueError(f"unknown backend {backend!r}")
