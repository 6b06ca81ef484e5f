"""Reproducible simulation experiments.

Each ``run_*`` function takes an :class:`~halfmass.config.ExperimentConfig`
and returns a report dict with per-configuration ``results``, a flat
``series`` (one row per metric, ready for plotting) and provenance. Every
random draw comes from a stream keyed by ``(seed, experiment id, ...,
trial)``, so reports are bit-identical across reruns and worker counts.
"""

import math
import platform
import time
from fractions import Fraction

import numpy as np
import scipy

from . import __version__, kernels
from .central import cover_counts, default_proxy_rank, knn_local_radii, proxy_mask
from .conformal import ConformalScorer
from .config import ExperimentConfig, parse_config
from .distributions import Contaminated
from .geometry import half_mass_radii, majority_rank
from .grid import hausdorff_distance_grid, mask_volume_fraction
from .population import beta_alpha, q_population_mask, sym_diff_probability
from .seeding import run_trials, stream

EXPERIMENT_IDS = {"coverage": 1, "consistency": 2, "hausdorff": 3, "proxy": 4, "contamination": 5}


class ExperimentError(RuntimeError):
    pass


class ProxySoundnessError(ExperimentError):
    """A certified proxy node fell outside the cover set it is meant to sit in."""


def _binomial_se(p, trials):
    return math.sqrt(p * (1 - p) / trials)


def _mean_se(values):
    v = np.asarray(values, dtype=np.float64)
    if v.size == 0:
        return float("nan"), float("nan")
    se = float(np.std(v, ddof=1) / math.sqrt(v.size)) if v.size > 1 else 0.0
    return float(np.mean(v)), se


def _derived_seed(seed, *key):
    return int(np.random.SeedSequence(seed, spawn_key=key).generate_state(1)[0])


class _Levels:
    """Population levels, computed once per alpha within a run."""

    def __init__(self, cfg, exp_id):
        self.cfg = cfg
        self.exp_id = exp_id
        self._cache = {}

    def __call__(self, alpha):
        if alpha not in self._cache:
            cfg = self.cfg
            self._cache[alpha] = beta_alpha(
                cfg.distribution, alpha, cfg.mc_samples,
                _derived_seed(cfg.seed, self.exp_id, 0xBE7A),
                method=cfg.level_method, delta_samples=cfg.delta_samples,
            )
        return self._cache[alpha]

    def provenance(self):
        return [lvl.to_dict() for lvl in self._cache.values()]


def _series_row(alpha, n, metric, value, se=None, trials=None):
    return {"alpha": alpha, "n": n, "metric": metric, "value": value, "se": se, "trials": trials}


def _report(cfg, results, series, extra, started):
    return {
        "experiment": cfg.experiment,
        "seed": cfg.seed,
        "config": cfg.to_dict(),
        "results": results,
        "series": series,
        **extra,
        "provenance": {
            "package": "halfmass",
            "version": __version__,
            "backend": kernels.backend(),
            "python": platform.python_version(),
            "numpy": np.__version__,
            "scipy": scipy.__version__,
        },
        "wall_clock_seconds": time.perf_counter() - started,
    }


def _as_config(cfg):
    return cfg if isinstance(cfg, ExperimentConfig) else parse_config(cfg)


def _delta_kw(cfg):
    return {"mc_samples": cfg.delta_samples, "seed": _derived_seed(cfg.seed, 0xD17A)}


# -- coverage ---------------------------------------------------------------

def _coverage_block(start, stop, dist, n, alpha, seed, key):
    out = []
    for trial in range(start, stop):
        pts = dist.sample(n + 1, stream(seed, *key, trial))
        out.append(bool(ConformalScorer(pts[:n]).contains(pts[n:], alpha)[0]))
    return out


def run_coverage(cfg):
    """Empirical marginal coverage of the conformal region.

    Reports coverage, its binomial SE, and whether it clears
    ``1 - alpha - 3 * sqrt(alpha (1 - alpha) / trials)``.
    """
    cfg = _as_config(cfg)
    started = time.perf_counter()
    exp_id = EXPERIMENT_IDS["coverage"]
    results, series = [], []
    for j, alpha in enumerate(cfg.alpha):
        for n in cfg.n:
            hits = run_trials(_coverage_block, cfg.trials, cfg.workers,
                              (cfg.distribution, n, alpha, cfg.seed, (exp_id, j, n)))
            covered = int(sum(hits))
            rate = covered / cfg.trials
            se = _binomial_se(rate, cfg.trials)
            bound = 1 - alpha - 3 * _binomial_se(1 - alpha, cfg.trials)
            results.append({
                "alpha": alpha, "n": n, "trials": cfg.trials, "covered": covered,
                "coverage": rate, "se": se, "lower_bound": bound, "valid": rate >= bound,
            })
            series.append(_series_row(alpha, n, "coverage", rate, se, cfg.trials))
    return _report(cfg, results, series, {}, started)


# -- consistency ------------------------------------------------------------

def run_consistency(cfg):
    """Symmetric-difference probability between region and population set, per n."""
    cfg = _as_config(cfg)
    if len(cfg.n) < 2:
        raise ExperimentError("consistency needs at least two sample sizes")
    started = time.perf_counter()
    exp_id = EXPERIMENT_IDS["consistency"]
    levels = _Levels(cfg, exp_id)
    results, series, trends = [], [], []
    for j, alpha in enumerate(cfg.alpha):
        level = levels(alpha)
        ests = []
        for n in cfg.n:
            est = sym_diff_probability(
                cfg.distribution, n, alpha, cfg.trials, cfg.seed, level=level,
                workers=cfg.workers, key=(exp_id, j, n), delta_kw=_delta_kw(cfg),
            )
            ests.append(est)
            results.append(est.to_dict())
            series.append(_series_row(alpha, n, "sym_diff", est.estimate, est.se, est.trials))
        first, last = ests[0], ests[-1]
        combined = math.hypot(first.se, last.se)
        steps_ok = all(
            b.estimate <= a.estimate + 2 * math.hypot(a.se, b.se) for a, b in zip(ests, ests[1:])
        )
        trends.append({
            "alpha": alpha,
            "first_n": first.n,
            "last_n": last.n,
            "drop": first.estimate - last.estimate,
            "combined_se": combined,
            "decreasing": first.estimate - last.estimate > 2 * combined,
            "non_increasing_within_2se": steps_ok,
        })
    return _report(cfg, results, series, {"trend": trends, "levels": levels.provenance()}, started)


# -- Hausdorff --------------------------------------------------------------

def _hausdorff_block(start, stop, cfg, n, alpha, beta, pop_mask, key):
    grid, dist = cfg.grid, cfg.distribution
    nodes = grid.nodes()
    out = []
    for rep in range(start, stop):
        data = dist.sample(n, stream(cfg.seed, *key, rep))
        k = majority_rank(n).k
        q_hat = cover_counts(nodes, data, beta) >= k
        region = ConformalScorer(data).contains(nodes, alpha)
        d_q = hausdorff_distance_grid(q_hat, pop_mask, grid) if q_hat.any() else float("nan")
        d_r = hausdorff_distance_grid(region, pop_mask, grid) if region.any() else float("nan")
        out.append((d_q, d_r))
    return out


def run_hausdorff(cfg):
    """Grid Hausdorff distance between the empirical and population central sets.

    For each n, ``replicates`` independent samples; reports the mean and SE
    of ``d_H(Q_hat_{beta_alpha}, Q_{beta_alpha})`` and, as a companion, of
    the conformal region against the same population set.
    """
    cfg = _as_config(cfg)
    if cfg.grid is None:
        raise ExperimentError("hausdorff experiments need a grid")
    started = time.perf_counter()
    exp_id = EXPERIMENT_IDS["hausdorff"]
    grid = cfg.grid
    levels = _Levels(cfg, exp_id)
    results, series = [], []
    nodes = grid.nodes()
    for j, alpha in enumerate(cfg.alpha):
        level = levels(alpha)
        pop = q_population_mask(nodes, cfg.distribution, level.beta_alpha, **_delta_kw(cfg))
        if not pop.any():
            raise ExperimentError(
                "the population set has no node on the grid; enlarge the bounding box or refine the grid"
            )
        for n in cfg.n:
            rows = run_trials(_hausdorff_block, cfg.replicates, cfg.workers,
                              (cfg, n, alpha, level.beta_alpha, pop, (exp_id, j, n)))
            d_q = [r[0] for r in rows]
            d_r = [r[1] for r in rows]
            ok_q = [v for v in d_q if not math.isnan(v)]
            ok_r = [v for v in d_r if not math.isnan(v)]
            mq, sq = _mean_se(ok_q)
            mr, sr = _mean_se(ok_r)
            results.append({
                "alpha": alpha, "n": n, "replicates": cfg.replicates,
                "beta_alpha": level.beta_alpha,
                "hausdorff": mq, "se": sq, "values": d_q, "empty_masks": len(d_q) - len(ok_q),
                "hausdorff_region": mr, "se_region": sr, "values_region": d_r,
                "population_volume_fraction": mask_volume_fraction(pop),
                "grid_spacing": list(grid.spacing), "grid_diagonal": grid.diagonal,
            })
            series.append(_series_row(alpha, n, "hausdorff", mq, sq, len(ok_q)))
            series.append(_series_row(alpha, n, "hausdorff_region", mr, sr, len(ok_r)))
    return _report(cfg, results, series, {"levels": levels.provenance(), "grid": grid.to_dict()}, started)


# -- proxy ------------------------------------------------------------------

def _proxy_block(start, stop, cfg, n, alpha, key):
    grid, dist = cfg.grid, cfg.distribution
    nodes = grid.nodes()
    out = []
    for rep in range(start, stop):
        data = dist.sample(n, stream(cfg.seed, *key, rep))
        scorer = ConformalScorer(data)
        beta = cfg.beta if cfg.beta is not None else scorer.empirical_level(alpha)
        local_k = cfg.k if cfg.k is not None else default_proxy_rank(n)
        if n < 2 or local_k < 1:
            raise ExperimentError("the proxy needs n >= 2")
        counts = cover_counts(nodes, data, beta)
        q_hat = counts >= scorer.k
        region = scorer.contains(nodes, alpha)
        proxy = proxy_mask(nodes, data, beta, radii=knn_local_radii(data, local_k))
        # the proxy guarantee: every certified node lies in >= k+1 balls
        if np.any(proxy & (counts < local_k + 1)):
            raise ProxySoundnessError(f"proxy node outside the (k+1)-cover set (n={n}, replicate {rep})")
        if local_k + 1 >= scorer.k and np.any(proxy & ~q_hat):
            raise ProxySoundnessError(f"proxy node outside Q_hat (n={n}, replicate {rep})")
        v_q, v_p = mask_volume_fraction(q_hat), mask_volume_fraction(proxy)
        out.append({
            "beta_hat": beta,
            "k": local_k,
            "region_volume": mask_volume_fraction(region),
            "q_hat_volume": v_q,
            "proxy_volume": v_p,
            "proxy_ratio": v_p / v_q if v_q > 0 else float("nan"),
        })
    return out


def run_proxy_comparison(cfg):
    """Grid volumes of the conformal region, ``Q_hat_{beta_hat}`` and its proxy.

    ``beta_hat`` is the heuristic empirical level (the
    ``ceil((1-alpha)(n+1))``-th in-sample half-mass radius) unless the
    config fixes ``beta``. Proxy inclusion is enforced node by node.
    """
    cfg = _as_config(cfg)
    if cfg.grid is None:
        raise ExperimentError("proxy experiments need a grid")
    started = time.perf_counter()
    exp_id = EXPERIMENT_IDS["proxy"]
    results, series = [], []
    for j, alpha in enumerate(cfg.alpha):
        for n in cfg.n:
            rows = run_trials(_proxy_block, cfg.replicates, cfg.workers, (cfg, n, alpha, (exp_id, j, n)))
            summary = {"alpha": alpha, "n": n, "replicates": cfg.replicates,
                       "beta_source": "config" if cfg.beta is not None else "heuristic empirical level",
                       "per_replicate": rows}
            for metric in ("region_volume", "q_hat_volume", "proxy_volume", "proxy_ratio"):
                vals = [r[metric] for r in rows if not math.isnan(r[metric])]
                mean, se = _mean_se(vals)
                summary[metric] = mean
                summary[metric + "_se"] = se
                series.append(_series_row(alpha, n, metric, mean, se, len(vals)))
            results.append(summary)
    trend = []
    for n in cfg.n:
        ratios = [(r["alpha"], r["proxy_ratio"]) for r in results if r["n"] == n]
        ratios.sort()
        trend.append({
            "n": n,
            "alphas": [a for a, _ in ratios],
            "proxy_ratio": [v for _, v in ratios],
            "ratio_decreases_with_alpha": all(b < a for (_, a), (_, b) in zip(ratios, ratios[1:])),
        })
    extra = {"grid": cfg.grid.to_dict(), "trend": trend, "proxy_inclusion_verified": True}
    return _report(cfg, results, series, extra, started)


# -- contamination ----------------------------------------------------------

def outlier_count(fraction, n):
    """``ceil(fraction * n)`` with ``fraction`` read as its decimal value."""
    q = Fraction(repr(float(fraction))) * n
    return int(-((-q.numerator) // q.denominator))


def contaminate(clean, indices, directions, magnitude, center=None):
    """Copy of ``clean`` with rows ``indices`` moved to ``center + magnitude * direction``."""
    out = np.array(clean, dtype=np.float64, copy=True)
    center = np.zeros(out.shape[1]) if center is None else np.asarray(center, dtype=np.float64)
    out[indices] = center + magnitude * np.asarray(directions, dtype=np.float64)
    return out


def unit_directions(count, dim, rng):
    g = rng.standard_normal((count, dim))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def run_contamination(cfg):
    """Outlier-magnitude invariance of half-mass radii and of ``Q_hat`` masks.

    A clean sample has ``ceil(fraction * n)`` points replaced by outliers at
    distance ``M`` and ``1e6 * M`` (same directions) from the base center.
    """
    cfg = _as_config(cfg)
    cont = cfg.contamination
    if not 0 <= cont.fraction < 0.5:
        raise ExperimentError("contamination fraction must be below 1/2 (breakdown threshold)")
    started = time.perf_counter()
    exp_id = EXPERIMENT_IDS["contamination"]
    base = cfg.distribution.base if isinstance(cfg.distribution, Contaminated) else cfg.distribution
    center = np.asarray(base.scale_hint()[0], dtype=np.float64)
    nodes = cfg.grid.nodes() if cfg.grid is not None else None
    results, series = [], []
    for n in cfg.n:
        for rep in range(cfg.replicates):
            rng = stream(cfg.seed, exp_id, n, rep)
            clean = base.sample(n, rng)
            count = outlier_count(cont.fraction, n)
            idx = np.sort(rng.choice(n, size=count, replace=False))
            dirs = unit_directions(count, base.dim, rng)
            small = contaminate(clean, idx, dirs, cont.magnitude, center)
            huge = contaminate(clean, idx, dirs, cont.magnitude * 1e6, center)
            probes = np.vstack([np.median(clean, axis=0)[None, :], base.sample(cont.probes - 1, rng)])
            s_clean = half_mass_radii(probes, clean)
            s_small = half_mass_radii(probes, small)
            s_huge = half_mass_radii(probes, huge)
            row = {
                "n": n, "replicate": rep, "outliers": count,
                "within_breakdown": count <= n - majority_rank(n).k,
                "magnitude": cont.magnitude, "magnitude_large": cont.magnitude * 1e6,
                "scores_clean": s_clean.tolist(), "scores_contaminated": s_small.tolist(),
                "magnitude_invariant": bool(np.array_equal(s_small, s_huge)),
                "identical_to_clean": bool(np.array_equal(small, clean)),
                "max_score_shift": float(np.max(np.abs(s_small - s_clean))),
            }
            if nodes is not None:
                alpha = cfg.alpha[0]
                beta = cfg.beta if cfg.beta is not None else ConformalScorer(clean).empirical_level(alpha)
                k = majority_rank(n).k
                m_clean = cover_counts(nodes, clean, beta) >= k
                m_small = cover_counts(nodes, small, beta) >= k
                m_huge = cover_counts(nodes, huge, beta) >= k
                row.update({
                    "beta": beta,
                    "mask_symdiff_fraction": mask_volume_fraction(m_clean ^ m_small),
                    "mask_magnitude_invariant": bool(np.array_equal(m_small, m_huge)),
                })
                series.append(_series_row(alpha, n, "mask_symdiff_fraction", row["mask_symdiff_fraction"]))
            series.append(_series_row(None, n, "max_score_shift", row["max_score_shift"]))
            series.append(_series_row(None, n, "magnitude_invariant", float(row["magnitude_invariant"])))
            results.append(row)
    extra = {"grid": cfg.grid.to_dict() if cfg.grid else None}
    return _report(cfg, results, series, extra, started)


RUNNERS = {
    "coverage": run_coverage,
    "consistency": run_consistency,
    "hausdorff": run_hausdorff,
    "proxy": run_proxy_comparison,
    "contamination": run_contamination,
}


def run_experiment(cfg):
    cfg = _as_config(cfg)
    return RUNNERS[cfg.experiment](cfg)


def metrics_only(report):
    """Report without wall-clock and environment fields, for reproducibility checks."""
    return {k: v for k, v in report.items() if k not in ("wall_clock_seconds", "provenance")}
