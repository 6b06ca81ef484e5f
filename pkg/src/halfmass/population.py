"""Population targets: the half-mass functional, its level sets, and their estimators.

``delta_p(x, P, m)`` is the smallest radius ``r`` with ``P(B(x, r)) > m``.
Closed forms are used where they exist; otherwise ``P`` is replaced by the
empirical measure of one fixed seeded evaluation sample, for which the
functional is an exact order statistic of the distances to ``x``.
"""

import math
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np
from scipy import optimize, stats

from . import kernels
from .conformal import ConformalScorer, _alpha, _ceil_rank
from .distributions import (
    Gaussian,
    PointMass,
    StudentT,
    UniformBall,
    UniformInterval,
    from_dict,
)
from .geometry import as_points
from .seeding import run_trials, stream

DEFAULT_MC_SAMPLES = 10**5
# evaluation sample for the Monte Carlo functional inside beta_alpha
DEFAULT_DELTA_SAMPLES = 10**4
MIN_LEVEL_SAMPLES = 100
MIN_TRIALS = 100


@dataclass(frozen=True)
class DeltaEstimate:
    value: float
    method: str
    samples: int = 0
    mass_se: float = 0.0


@dataclass(frozen=True)
class PopulationLevel:
    beta_alpha: float
    alpha: float
    method: str
    samples: int = 0
    seed: int | None = None
    coverage: float = float("nan")
    coverage_se: float = 0.0

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class SymDiffEstimate:
    estimate: float
    se: float
    trials: int
    n: int
    alpha: float
    beta_alpha: float

    def to_dict(self):
        return asdict(self)


def _mass(m):
    m = float(m)
    if not 0 <= m < 1:
        raise ValueError(f"mass level m must lie in [0, 1), got {m}")
    return m


def _interval_delta(x, low, high, m):
    length = high - low
    target = m * length
    if x < low:
        return (low - x) + target
    if x > high:
        return (x - high) + target
    near = min(x - low, high - x)
    if 2 * near >= target:
        return target / 2
    return target - near


def _root(mass_fn, m, lo, hi):
    if m == 0:
        return lo
    return optimize.brentq(lambda r: mass_fn(r) - m, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps)


def has_analytic_delta(dist):
    if isinstance(dist, (PointMass, UniformInterval, UniformBall)):
        return True
    if isinstance(dist, Gaussian):
        return dist.isotropic_scale is not None
    return isinstance(dist, StudentT) and dist.dim == 1


def _analytic_deltas(xs, dist, m):
    if isinstance(dist, PointMass):
        # math.dist is the most accurately rounded norm available
        return np.array([math.dist(x, dist.center) for x in xs.tolist()], dtype=np.float64)
    if isinstance(dist, UniformInterval):
        return np.array([_interval_delta(x, dist.low, dist.high, m) for x in xs[:, 0]])
    if isinstance(dist, UniformBall):
        c, big = dist.center, dist.radius
        if dist.dim == 1:
            return np.array([_interval_delta(x, c[0] - big, c[0] + big, m) for x in xs[:, 0]])
        ts = np.sqrt(kernels.sq_dists(c[None, :], xs)[:, 0])
        out = np.empty(ts.size)
        for j, t in enumerate(ts):
            if t == 0:
                out[j] = big * m ** (1.0 / dist.dim)
            else:
                x = c + np.eye(dist.dim)[0] * t
                out[j] = _root(lambda r: dist.ball_mass(x, r), m, max(0.0, t - big), t + big)
        return out
    if isinstance(dist, Gaussian):
        sigma = dist.isotropic_scale
        if m == 0:
            return np.zeros(xs.shape[0])
        rho2 = kernels.sq_dists(dist.mean[None, :], xs)[:, 0] / sigma**2
        s = np.where(
            rho2 > 0,
            stats.ncx2.ppf(m, dist.dim, np.maximum(rho2, np.finfo(float).tiny)),
            stats.chi2.ppf(m, dist.dim),
        )
        return sigma * np.sqrt(s)
    if isinstance(dist, StudentT) and dist.dim == 1:
        out = np.empty(xs.shape[0])
        width = dist.scale * stats.t.ppf(1 - (1 - m) / 4, dist.df)
        for j, x in enumerate(xs):
            gap = abs(x[0] - dist.loc[0])
            out[j] = _root(lambda r: dist.ball_mass(x, r), m, 0.0, gap + 2 * width + 1.0)
        return out
    raise ValueError(f"no closed form for the half-mass functional of {dist.kind}")


def evaluation_sample(dist, mc_samples, seed):
    """The fixed sample standing in for ``dist`` in Monte Carlo evaluations."""
    return np.ascontiguousarray(dist.sample(int(mc_samples), stream(seed, 0xD17A)), dtype=np.float64)


def _mc_rank(m, size):
    # smallest count strictly above m * size
    return math.floor(Fraction(repr(m)) * size) + 1


def delta_p_many(xs, dist, m=0.5, method="auto", mc_samples=DEFAULT_MC_SAMPLES, seed=0):
    """Vectorised :func:`delta_p` over the rows of ``xs``."""
    dist = from_dict(dist)
    m = _mass(m)
    xs = as_points(xs, dim=dist.dim, allow_empty=True)
    if method not in ("auto", "analytic", "monte-carlo"):
        raise ValueError(f"unknown method {method!r}")
    if method == "analytic" or (method == "auto" and has_analytic_delta(dist)):
        if not has_analytic_delta(dist):
            raise ValueError(f"no closed form for the half-mass functional of {dist.kind}")
        return _analytic_deltas(xs, dist, m)
    if mc_samples < 1:
        raise ValueError("mc_samples must be positive")
    ref = evaluation_sample(dist, mc_samples, seed)
    if xs.shape[0] == 0:
        return np.empty(0)
    return np.sqrt(kernels.kth_sq(ref, xs, _mc_rank(m, ref.shape[0])))


def delta_p_estimate(x, dist, m=0.5, method="auto", mc_samples=DEFAULT_MC_SAMPLES, seed=0):
    """:func:`delta_p` together with how it was obtained and its mass tolerance."""
    dist = from_dict(dist)
    m = _mass(m)
    value = float(delta_p_many(np.atleast_1d(x)[None, :], dist, m, method, mc_samples, seed)[0])
    if method == "analytic" or (method == "auto" and has_analytic_delta(dist)):
        return DeltaEstimate(value, "analytic")
    return DeltaEstimate(value, "monte-carlo", int(mc_samples), math.sqrt(m * (1 - m) / mc_samples))


def delta_p(x, dist, m=0.5, method="auto", mc_samples=DEFAULT_MC_SAMPLES, seed=0):
    """Half-mass functional ``inf{r > 0 : P(B(x, r)) > m}``.

    Parameters
    ----------
    x : array_like, shape (d,)
    dist : Distribution or dict
    m : float
        Mass level in ``[0, 1)``; ``1/2`` gives the half-mass radius.
    method : {"auto", "analytic", "monte-carlo"}
        ``auto`` uses a closed form when the distribution has one.
    mc_samples, seed : int
        Size and seed of the evaluation sample for the Monte Carlo path.
    """
    return delta_p_estimate(x, dist, m, method, mc_samples, seed).value


def has_analytic_level(dist):
    if isinstance(dist, (PointMass, UniformInterval, UniformBall)):
        return True
    if isinstance(dist, Gaussian):
        return dist.isotropic_scale is not None
    return isinstance(dist, StudentT) and dist.dim == 1


def _analytic_level(dist, alpha):
    # every closed-form case has delta increasing in the distance to its center
    if isinstance(dist, PointMass):
        return 0.0
    if isinstance(dist, UniformInterval) or (isinstance(dist, UniformBall) and dist.dim == 1):
        if isinstance(dist, UniformInterval):
            length = dist.high - dist.low
        else:
            length = 2 * dist.radius
        return max(length / 4, (1 - alpha) * length / 2)
    if isinstance(dist, UniformBall):
        rho = dist.radius * (1 - alpha) ** (1.0 / dist.dim)
        x = dist.center + np.eye(dist.dim)[0] * rho
        return float(_analytic_deltas(x[None, :], dist, 0.5)[0])
    if isinstance(dist, Gaussian):
        rho = dist.isotropic_scale * math.sqrt(stats.chi2.ppf(1 - alpha, dist.dim))
        x = dist.mean + np.eye(dist.dim)[0] * rho
        return float(_analytic_deltas(x[None, :], dist, 0.5)[0])
    x = dist.loc + dist.scale * stats.t.ppf(1 - alpha / 2, dist.df)
    return float(_analytic_deltas(np.atleast_2d(x), dist, 0.5)[0])


def lower_quantile(values, alpha):
    """Smallest value with at least a ``1 - alpha`` fraction of ``values`` at or below it."""
    v = np.sort(np.asarray(values, dtype=np.float64))
    rank = _ceil_rank(alpha, v.size)
    return float(v[max(rank, 1) - 1])


def beta_alpha(dist, alpha, mc_samples=DEFAULT_MC_SAMPLES, seed=0, method="auto",
               delta_samples=DEFAULT_DELTA_SAMPLES):
    """Level ``inf{beta : P(delta_P(X) <= beta) >= 1 - alpha}``.

    Parameters
    ----------
    dist : Distribution or dict
    alpha : float in (0, 1)
    mc_samples : int
        Draws ``Z_j ~ dist`` for the Monte Carlo path (at least 100).
    seed : int
    method : {"auto", "analytic", "monte-carlo"}
        ``monte-carlo`` takes the lower empirical ``(1 - alpha)``-quantile
        of ``delta_P(Z_j)``; ``delta_P`` itself is still analytic when a
        closed form exists.
    delta_samples : int
        Evaluation-sample size when ``delta_P`` has no closed form.

    Returns
    -------
    PopulationLevel
    """
    dist = from_dict(dist)
    alpha = _alpha(alpha)
    if method == "analytic" or (method == "auto" and has_analytic_level(dist)):
        if not has_analytic_level(dist):
            raise ValueError(f"no closed-form level for {dist.kind}")
        return PopulationLevel(_analytic_level(dist, alpha), alpha, "analytic", coverage=1 - alpha)
    if method not in ("auto", "monte-carlo"):
        raise ValueError(f"unknown method {method!r}")
    if mc_samples < MIN_LEVEL_SAMPLES:
        raise ValueError(f"mc_samples must be at least {MIN_LEVEL_SAMPLES} for the Monte Carlo level")
    draws = dist.sample(int(mc_samples), stream(seed, 0xBE7A))
    vals = delta_p_many(draws, dist, 0.5, "auto", delta_samples, seed)
    level = lower_quantile(vals, alpha)
    cov = float(np.mean(vals <= level))
    return PopulationLevel(
        level, alpha, "monte-carlo", int(mc_samples), int(seed),
        cov, math.sqrt(cov * (1 - cov) / mc_samples),
    )


def q_population_mask(xs, dist, beta, **delta_kw):
    """``delta_P(x) <= beta`` for each row of ``xs``."""
    beta = float(beta)
    if not beta >= 0:
        raise ValueError("beta must be nonnegative")
    return delta_p_many(xs, dist, 0.5, **delta_kw) <= beta


def q_population_membership(x, dist, beta, **delta_kw):
    """True iff ``delta_P(x) <= beta``."""
    dist = from_dict(dist)
    return bool(q_population_mask(np.atleast_1d(x)[None, :], dist, beta, **delta_kw)[0])


def _symdiff_block(start, stop, dist, n, alpha, seed, key):
    out = []
    for trial in range(start, stop):
        pts = dist.sample(n + 1, stream(seed, *key, trial))
        inside = bool(ConformalScorer(pts[:n]).contains(pts[n:], alpha)[0])
        out.append((inside, pts[n]))
    return out


def sym_diff_probability(dist, n, alpha, trials, seed, level=None, workers=1,
                         mc_samples=DEFAULT_MC_SAMPLES, key=(), delta_kw=None):
    """Monte Carlo estimate of ``P(X in region(sample) xor X in Q_{beta_alpha})``.

    Each trial draws a fresh sample of size ``n`` and a fresh ``X``; the
    population level is computed once (or passed in as ``level``).

    Returns
    -------
    SymDiffEstimate
        Mean disagreement and its binomial standard error.
    """
    dist = from_dict(dist)
    alpha = _alpha(alpha)
    if trials < MIN_TRIALS:
        raise ValueError(f"trials must be at least {MIN_TRIALS}, got {trials}")
    if n < 1:
        raise ValueError("sample size n must be at least 1")
    if level is None:
        level = beta_alpha(dist, alpha, mc_samples, seed)
    rows = run_trials(_symdiff_block, int(trials), workers, (dist, int(n), alpha, seed, tuple(key)))
    inside = np.array([r[0] for r in rows])
    xs = np.array([r[1] for r in rows])
    in_q = q_population_mask(xs, dist, level.beta_alpha, **(delta_kw or {}))
    disagree = inside != in_q
    est = float(np.mean(disagree))
    return SymDiffEstimate(est, math.sqrt(est * (1 - est) / trials), int(trials), int(n),
                           alpha, level.beta_alpha)
