"""Pure numpy implementations of the hot kernels.

Every function here has a compiled twin in ``_ckernels.pyx`` with the same
signature and bit-identical output. Squared distances are accumulated one
coordinate at a time, in index order, so both backends round identically.
"""

import numpy as np

# Rows of the (queries x points) distance block processed at once.
_BLOCK_ELEMS = 1 << 22


def _block_rows(n_points):
    return max(1, _BLOCK_ELEMS // max(1, n_points))


def sq_dists(points, queries):
    """Squared Euclidean distances, shape ``(len(queries), len(points))``."""
    d = points.shape[1]
    diff = queries[:, None, 0] - points[None, :, 0]
    acc = diff * diff
    for j in range(1, d):
        diff = queries[:, None, j] - points[None, :, j]
        acc += diff * diff
    return acc


def kth_sq(points, queries, k):
    """k-th smallest squared distance (1-based) from each query to ``points``."""
    m, n = queries.shape[0], points.shape[0]
    out = np.empty(m, dtype=np.float64)
    step = _block_rows(n)
    for start in range(0, m, step):
        block = sq_dists(points, queries[start:start + step])
        out[start:start + step] = np.partition(block, k - 1, axis=1)[:, k - 1]
    return out


def others_pair_sq(points, k):
    """(k-1)-th and k-th smallest squared distance from each point to the others.

    Ranks count over ``j != i``. Missing ranks are padded: ``lo = -inf`` when
    ``k == 1`` and ``hi = +inf`` when ``k > n - 1``.
    """
    n = points.shape[0]
    lo = np.full(n, -np.inf)
    hi = np.full(n, np.inf)
    if n < 2:
        return lo, hi
    step = _block_rows(n)
    want = [r - 1 for r in (k - 1, k) if 1 <= r <= n - 1]
    for start in range(0, n, step):
        block = sq_dists(points, points[start:start + step])
        rows = np.arange(block.shape[0])
        # self-distance pushed past every real neighbour
        block[rows, rows + start] = np.inf
        part = np.partition(block, want, axis=1)
        if k - 1 >= 1:
            lo[start:start + step] = part[:, k - 2]
        if k <= n - 1:
            hi[start:start + step] = part[:, k - 1]
    return lo, hi


def pvalue_counts(points, lo_sq, hi_sq, queries, k):
    """Number of leave-one-out scores at least as large as the candidate's.

    For candidate ``z`` the i-th bag score is the k-th smallest of the other
    points' distances plus ``|z - x_i|``, which is ``clip(a_i, lo_i, hi_i)``
    in squared units. The candidate itself is always counted.
    """
    m, n = queries.shape[0], points.shape[0]
    out = np.empty(m, dtype=np.int64)
    step = _block_rows(n)
    for start in range(0, m, step):
        block = sq_dists(points, queries[start:start + step])
        own = np.partition(block, k - 1, axis=1)[:, k - 1]
        loo = np.minimum(np.maximum(block, lo_sq[None, :]), hi_sq[None, :])
        out[start:start + step] = 1 + np.count_nonzero(loo >= own[:, None], axis=1)
    return out


def cover_counts(points, queries, thr_sq):
    """Number of points within squared distance ``thr_sq`` of each query."""
    m, n = queries.shape[0], points.shape[0]
    out = np.empty(m, dtype=np.int64)
    step = _block_rows(n)
    for start in range(0, m, step):
        block = sq_dists(points, queries[start:start + step])
        out[start:start + step] = np.count_nonzero(block <= thr_sq, axis=1)
    return out


def any_within(centers, thr_sq, queries):
    """True where some center ``i`` has squared distance ``<= thr_sq[i]``."""
    m, n = queries.shape[0], centers.shape[0]
    out = np.zeros(m, dtype=bool)
    if n == 0:
        return out
    step = _block_rows(n)
    for start in range(0, m, step):
        block = sq_dists(centers, queries[start:start + step])
        out[start:start + step] = np.any(block <= thr_sq[None, :], axis=1)
    return out
