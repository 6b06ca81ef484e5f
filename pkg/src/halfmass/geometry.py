"""Points, distances, order statistics and the empirical half-mass radius.

Points are 1-D float arrays of length ``d``; a dataset is an ``(n, d)``
float array treated as a multiset (duplicates count with multiplicity).
Rank-only computations work on squared distances; a square root is taken
only on the value handed back to the caller.
"""

from typing import NamedTuple

import numpy as np

from . import kernels


class MajorityRank(NamedTuple):
    n: int
    k: int


def as_point(z, dim=None):
    """Validate and convert ``z`` to a finite 1-D float array."""
    arr = np.atleast_1d(np.asarray(z, dtype=np.float64))
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("a point needs at least one coordinate")
    if not np.all(np.isfinite(arr)):
        raise ValueError("point coordinates must be finite")
    if dim is not None and arr.size != dim:
        raise ValueError(f"dimension mismatch: point has {arr.size} coordinates, expected {dim}")
    return arr


def as_points(data, dim=None, allow_empty=False):
    """Validate and convert ``data`` to an ``(n, d)`` float array.

    A 1-D input is read as ``n`` points on the line.
    """
    arr = np.asarray(data, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1) if dim in (None, 1) else arr.reshape(1, -1)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D array of points, got shape {arr.shape}")
    if arr.shape[0] == 0 and not allow_empty:
        raise ValueError("dataset is empty")
    if arr.shape[1] == 0:
        raise ValueError("points need at least one coordinate")
    if not np.all(np.isfinite(arr)):
        raise ValueError("point coordinates must be finite")
    if dim is not None and arr.shape[1] != dim:
        raise ValueError(f"dimension mismatch: data has dimension {arr.shape[1]}, expected {dim}")
    return arr


def euclidean_distance(a, b):
    """Euclidean distance between two points of equal dimension."""
    a = as_point(a)
    b = as_point(b, dim=a.size)
    return float(np.sqrt(kernels.kth_sq(b[None, :], a[None, :], 1)[0]))


def majority_rank(n):
    """Smallest strict majority of ``n`` items, ``floor(n/2) + 1``."""
    n = int(n)
    if n < 1:
        raise ValueError("majority rank needs n >= 1 (an empty bag has no majority)")
    return MajorityRank(n, n // 2 + 1)


def kth_nn_radius(z, data, k):
    """k-th smallest distance from ``z`` to the points of ``data``.

    Parameters
    ----------
    z : array_like, shape (d,)
    data : array_like, shape (n, d)
    k : int
        Rank, ``1 <= k <= n``. Ties are counted with multiplicity.
    """
    pts = as_points(data)
    z = as_point(z, dim=pts.shape[1])
    n = pts.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k={k} out of range for {n} points")
    return float(np.sqrt(kernels.kth_sq(pts, z[None, :], k)[0]))


def kth_nn_radii(queries, data, k):
    """Vectorised :func:`kth_nn_radius` over the rows of ``queries``."""
    pts = as_points(data)
    qs = as_points(queries, dim=pts.shape[1], allow_empty=True)
    n = pts.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k={k} out of range for {n} points")
    if qs.shape[0] == 0:
        return np.empty(0)
    return np.sqrt(kernels.kth_sq(pts, qs, k))


def half_mass_radius(z, data):
    """Smallest closed-ball radius around ``z`` holding a strict majority of ``data``."""
    pts = as_points(data)
    return kth_nn_radius(z, pts, majority_rank(pts.shape[0]).k)


def half_mass_radii(queries, data):
    """Vectorised :func:`half_mass_radius`."""
    pts = as_points(data)
    return kth_nn_radii(queries, pts, majority_rank(pts.shape[0]).k)


def sq_threshold(radius):
    """Largest float ``s`` with ``sqrt(s) <= radius``.

    Lets closed-ball tests ``|y - x| <= radius`` run on squared distances
    while agreeing exactly with the square-rooted comparison.
    """
    radius = float(radius)
    if radius < 0:
        return -np.inf
    if np.isinf(radius):
        return np.inf
    s = radius * radius
    while s > 0 and np.sqrt(s) > radius:
        s = np.nextafter(s, -np.inf)
    while np.sqrt(np.nextafter(s, np.inf)) <= radius:
        s = np.nextafter(s, np.inf)
    return float(s)
