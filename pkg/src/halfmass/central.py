"""Empirical central sets built from balls of radius ``beta`` around the sample.

``Q_hat`` holds points covered by a strict majority of the balls, ``S_hat``
points covered by at least ``ceil(n/2)`` of them. The proxy is a union of
smaller balls around sample points whose local neighbour radius is below
``beta``; it is guaranteed to sit inside the cover set with threshold
``k + 1``.
"""

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from . import kernels
from .geometry import as_point, as_points, majority_rank, sq_threshold

BRUTE_FORCE_MAX_N = 15


def _beta(beta):
    beta = float(beta)
    if not beta >= 0:
        raise ValueError(f"level beta must be nonnegative, got {beta}")
    return beta


def cover_count(y, data, beta):
    """Number of closed balls ``B(x_i, beta)`` containing ``y``."""
    pts = as_points(data)
    y = as_point(y, dim=pts.shape[1])
    return int(cover_counts(y[None, :], pts, beta)[0])


def cover_counts(queries, data, beta):
    """Vectorised :func:`cover_count` over the rows of ``queries``."""
    pts = as_points(data)
    qs = as_points(queries, dim=pts.shape[1], allow_empty=True)
    return kernels.cover_counts(pts, qs, sq_threshold(_beta(beta)))


def q_hat_membership(y, data, beta):
    """``y`` lies in at least ``floor(n/2)+1`` of the balls."""
    pts = as_points(data)
    return cover_count(y, pts, beta) >= majority_rank(pts.shape[0]).k


def s_hat_membership(y, data, beta):
    """``y`` lies in at least ``ceil(n/2)`` of the balls."""
    pts = as_points(data)
    n = pts.shape[0]
    return cover_count(y, pts, beta) >= (n + 1) // 2


def q_hat_mask(queries, data, beta):
    pts = as_points(data)
    return cover_counts(queries, pts, beta) >= majority_rank(pts.shape[0]).k


def s_hat_mask(queries, data, beta):
    pts = as_points(data)
    return cover_counts(queries, pts, beta) >= (pts.shape[0] + 1) // 2


def q_hat_brute_force(y, data, beta):
    """Union-of-intersections membership by enumerating index subsets.

    Independent check of :func:`q_hat_membership`; only for ``n <= 15``.
    """
    pts = as_points(data)
    y = as_point(y, dim=pts.shape[1])
    beta = _beta(beta)
    n = pts.shape[0]
    if n > BRUTE_FORCE_MAX_N:
        raise ValueError(f"subset enumeration is limited to n <= {BRUTE_FORCE_MAX_N} (got {n})")
    inside = []
    for p in pts:
        acc = 0.0
        for a, b in zip(y.tolist(), p.tolist()):
            acc += (a - b) * (a - b)
        inside.append(bool(np.sqrt(acc) <= beta))
    k = n // 2 + 1
    for size in range(k, n + 1):
        for subset in combinations(range(n), size):
            if all(inside[i] for i in subset):
                return True
    return False


@dataclass(frozen=True)
class ProxyRadii:
    d_locals: np.ndarray
    k: int


def default_proxy_rank(n):
    """Local rank whose proxy lands inside the half-mass set: ``floor(n/2)``."""
    return majority_rank(n).k - 1


def knn_local_radii(data, k=None):
    """k-th nearest-neighbour distance of each sample point among the others.

    Parameters
    ----------
    data : array_like, shape (n, d)
    k : int, optional
        Local rank, ``1 <= k <= n - 1``. Defaults to ``floor(n/2)``.
    """
    pts = as_points(data)
    n = pts.shape[0]
    if k is None:
        k = default_proxy_rank(n)
    if not 1 <= k <= n - 1:
        raise ValueError(f"local rank k={k} must satisfy 1 <= k <= n-1 = {n - 1}")
    _, hi = kernels.others_pair_sq(pts, k)
    return ProxyRadii(np.sqrt(hi), int(k))


def certified_balls(data, beta, k=None, radii=None):
    """Centers and radii ``beta - D_i`` of the balls with ``beta > D_i``.

    Returns
    -------
    centers : ndarray, shape (m, d)
    radii : ndarray, shape (m,)
    """
    pts = as_points(data)
    beta = _beta(beta)
    radii = radii if radii is not None else knn_local_radii(pts, k)
    keep = beta > radii.d_locals
    return pts[keep], beta - radii.d_locals[keep]


def proxy_mask(queries, data, beta, k=None, radii=None):
    """Membership in the union of certified balls for each query row."""
    pts = as_points(data)
    qs = as_points(queries, dim=pts.shape[1], allow_empty=True)
    centers, rad = certified_balls(pts, beta, k, radii)
    thr = np.array([sq_threshold(r) for r in rad], dtype=np.float64)
    return kernels.any_within(centers.reshape(-1, pts.shape[1]), thr, qs)


def proxy_membership(y, data, beta, k=None):
    """True iff some certified ball ``B(x_i, beta - D_i)`` contains ``y``."""
    pts = as_points(data)
    y = as_point(y, dim=pts.shape[1])
    return bool(proxy_mask(y[None, :], pts, beta, k)[0])
