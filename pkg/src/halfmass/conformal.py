"""Full conformal prediction with the half-mass radius score.

For a candidate ``z`` the i-th leave-one-out bag is the sample with ``X_i``
swapped for ``z``; its score at ``X_i`` is the majority-rank neighbour
distance. The bag scores differ from the data-only neighbour lists by a
single entry, so the data part is precomputed once per sample
(:class:`ConformalScorer`) and each candidate then costs ``O(n)``.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

from . import kernels
from .geometry import as_point, as_points, majority_rank

BRUTE_FORCE_MAX_N = 20


@dataclass(frozen=True)
class ConformalConfig:
    alpha: float

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")


def _alpha(alpha):
    if isinstance(alpha, ConformalConfig):
        return alpha.alpha
    return ConformalConfig(float(alpha)).alpha


def alpha_fraction(alpha):
    """``alpha`` as the rational its shortest decimal repr denotes (0.3 -> 3/10)."""
    return Fraction(repr(float(alpha)))


def nonconformity_score(bag, z):
    """Majority radius of ``z`` with respect to ``bag``.

    Equals the min over strict majorities ``I`` of the bag of
    ``max_{x in I} |z - x|``, i.e. the distance from ``z`` to its
    ``floor(n/2)+1``-th nearest neighbour in the bag.
    """
    pts = as_points(bag)
    z = as_point(z, dim=pts.shape[1])
    k = majority_rank(pts.shape[0]).k
    return float(np.sqrt(kernels.kth_sq(pts, z[None, :], k)[0]))


def brute_force_score(bag, z):
    """Min-max over all size-``floor(n/2)+1`` subsets, by enumeration.

    Independent check of :func:`nonconformity_score`; only for small bags.
    """
    pts = as_points(bag)
    z = as_point(z, dim=pts.shape[1])
    n = pts.shape[0]
    if n > BRUTE_FORCE_MAX_N:
        raise ValueError(
            f"brute force enumeration is limited to n <= {BRUTE_FORCE_MAX_N} "
            f"(got {n}); use nonconformity_score instead"
        )
    dists = []
    for p in pts:
        acc = 0.0
        for a, b in zip(z.tolist(), p.tolist()):
            acc += (a - b) * (a - b)
        dists.append(math.sqrt(acc))
    k = n // 2 + 1
    return min(max(dists[i] for i in subset) for subset in combinations(range(n), k))


class ConformalScorer:
    """Precomputed conformal state for a fixed sample.

    Parameters
    ----------
    data : array_like, shape (n, d)
    """

    def __init__(self, data):
        self.data = as_points(data)
        self.n, self.dim = self.data.shape
        self.k = majority_rank(self.n).k
        # neighbours k-1 and k of each X_i among the other sample points
        self.lo_sq, self.hi_sq = kernels.others_pair_sq(self.data, self.k)

    def _queries(self, zs):
        return as_points(zs, dim=self.dim, allow_empty=True)

    def scores(self, z):
        """Leave-one-out scores ``R_1..R_{n+1}``; the last is the candidate's."""
        z = as_point(z, dim=self.dim)
        a = kernels.sq_dists(self.data, z[None, :])[0]
        own = kernels.kth_sq(self.data, z[None, :], self.k)[0]
        loo = np.minimum(np.maximum(a, self.lo_sq), self.hi_sq)
        return np.sqrt(np.append(loo, own))

    def counts(self, zs):
        """``#{i : R_i >= R_{n+1}}`` for each candidate row of ``zs``."""
        qs = self._queries(zs)
        if qs.shape[0] == 0:
            return np.empty(0, dtype=np.int64)
        return kernels.pvalue_counts(self.data, self.lo_sq, self.hi_sq, qs, self.k)

    def p_value(self, z):
        z = as_point(z, dim=self.dim)
        return Fraction(int(self.counts(z[None, :])[0]), self.n + 1)

    def p_values(self, zs):
        return self.counts(zs) / (self.n + 1)

    def contains(self, zs, alpha):
        """Region membership ``p_z > alpha`` for each candidate row."""
        alpha = _alpha(alpha)
        # count/(n+1) > alpha  <=>  count > floor(alpha*(n+1)), exactly
        threshold = math.floor(alpha_fraction(alpha) * (self.n + 1))
        return self.counts(zs) > threshold

    def empirical_level(self, alpha):
        """Heuristic empirical level for the conformal region.

        The ``ceil((1-alpha)(n+1))``-th smallest in-sample half-mass radius
        (``inf`` when that rank exceeds ``n``). This is a diagnostic, not an
        exact identity: the region is only approximately a sublevel set.
        """
        alpha = _alpha(alpha)
        own = np.sqrt(kernels.kth_sq(self.data, self.data, self.k))
        rank = _ceil_rank(alpha, self.n + 1)
        if rank > self.n:
            return float("inf")
        return float(np.sort(own)[rank - 1])


def _ceil_rank(alpha, size):
    """``ceil((1 - alpha) * size)`` in exact rational arithmetic."""
    q = (1 - alpha_fraction(alpha)) * size
    return int(-((-q.numerator) // q.denominator))


def leave_one_out_scores(data, z):
    """Scores ``R_1..R_{n+1}`` of the augmented sample for candidate ``z``."""
    return ConformalScorer(data).scores(z)


def bag_scores_direct(data, z):
    """Reference path: build each bag explicitly and score it.

    ``O(n^2 log n)`` per candidate; used to check :class:`ConformalScorer`.
    Returns squared scores, since p-values compare ranks.
    """
    pts = as_points(data)
    z = as_point(z, dim=pts.shape[1])
    n = pts.shape[0]
    k = majority_rank(n).k
    out = np.empty(n + 1)
    for i in range(n):
        bag = np.vstack([np.delete(pts, i, axis=0), z[None, :]])
        out[i] = kernels._pykernels.kth_sq(bag, pts[i][None, :], k)[0]
    out[n] = kernels._pykernels.kth_sq(pts, z[None, :], k)[0]
    return out


def conformal_p_value(data, z):
    """Conformal p-value as an exact fraction ``c / (n + 1)``.

    The count uses ``R_i >= R_{n+1}`` and includes the candidate itself.
    """
    return ConformalScorer(data).p_value(z)


def region_membership(data, z, cfg):
    """True iff ``conformal_p_value(data, z) > alpha``."""
    alpha = _alpha(cfg)
    return conformal_p_value(data, z) > alpha_fraction(alpha)


def region_on_grid(data, grid, cfg, scorer=None):
    """Boolean mask of the conformal region over the nodes of ``grid``."""
    alpha = _alpha(cfg)
    pts = as_points(data)
    if grid.dim != pts.shape[1]:
        raise ValueError(f"grid dimension {grid.dim} does not match data dimension {pts.shape[1]}")
    if grid.size == 0:
        raise ValueError("grid has no nodes")
    scorer = scorer or ConformalScorer(pts)
    return scorer.contains(grid.nodes(), alpha)
