"""Backend selection for the hot kernels.

The compiled extension is used when it imports; otherwise the numpy
fallback. Both produce identical output, so the choice only affects speed.
"""

import numpy as np

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # pragma: no cover - depends on the build
    _ckernels = None

BACKENDS = ("compiled", "python")
_active = _ckernels if _ckernels is not None else _pykernels


def available_backends():
    return [name for name in BACKENDS if name == "python" or _ckernels is not None]


def backend():
    """Name of the active backend."""
    return "compiled" if _active is _ckernels and _ckernels is not None else "python"


def use_backend(name):
    """Switch the active backend; returns the previous name."""
    global _active
    previous = backend()
    if name == "compiled":
        if _ckernels is None:
            raise RuntimeError("compiled kernels are not built; reinstall with a C compiler")
        _active = _ckernels
    elif name == "python":
        _active = _pykernels
    else:
        raise ValueError(f"unknown backend {name!r}; expected one of {BACKENDS}")
    return previous


def _c(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def kth_sq(points, queries, k):
    return _active.kth_sq(_c(points), _c(queries), int(k))


def others_pair_sq(points, k):
    return _active.others_pair_sq(_c(points), int(k))


def pvalue_counts(points, lo_sq, hi_sq, queries, k):
    return _active.pvalue_counts(_c(points), _c(lo_sq), _c(hi_sq), _c(queries), int(k))


def cover_counts(points, queries, thr_sq):
    return _active.cover_counts(_c(points), _c(queries), float(thr_sq))


def any_within(centers, thr_sq, queries):
    return _active.any_within(_c(centers), _c(thr_sq), _c(queries))


def sq_dists(points, queries):
    """Full ``(m, n)`` squared-distance matrix; vectorised numpy on every backend."""
    return _pykernels.sq_dists(_c(points), _c(queries))
