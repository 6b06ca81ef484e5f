import numpy as np
import pytest

from halfmass.config import parse_config
from halfmass.experiments import (
    ExperimentError,
    contaminate,
    metrics_only,
    outlier_count,
    run_experiment,
)

GAUSS = {"kind": "gaussian", "dim": 2}
SMALL_GRID = {"lower": [-4, -4], "upper": [4, 4], "counts": [41, 41]}


def _run(**doc):
    doc.setdefault("seed", 5)
    return run_experiment(parse_config(doc))


def test_coverage_point_mass():
    r = _run(experiment="coverage", distribution={"kind": "point-mass", "center": [0, 0]},
             n=[1, 7], alpha=0.1, trials=100)
    assert [row["coverage"] for row in r["results"]] == [1.0, 1.0]


def test_coverage_gaussian_small():
    r = _run(experiment="coverage", distribution=GAUSS, n=30, alpha=0.2, trials=400)
    row = r["results"][0]
    assert row["valid"] and row["coverage"] >= row["lower_bound"]


def test_consistency_point_mass_all_zero():
    r = _run(experiment="consistency", distribution={"kind": "point-mass", "center": [1]},
             n=[3, 9], alpha=0.1, trials=100)
    assert [row["estimate"] for row in r["results"]] == [0.0, 0.0]


def test_hausdorff_point_mass_zero():
    r = _run(experiment="hausdorff", distribution={"kind": "point-mass", "center": [0.0]},
             n=[1, 4], alpha=0.1, replicates=3, grid={"lower": [-1], "upper": [1], "counts": [5]})
    assert [row["hausdorff"] for row in r["results"]] == [0.0, 0.0]


def test_hausdorff_grid_excluding_support():
    with pytest.raises(ExperimentError, match="enlarge"):
        _run(experiment="hausdorff", distribution={"kind": "point-mass", "center": [5.0]},
             n=[2], alpha=0.1, replicates=2, grid={"lower": [-1], "upper": [1], "counts": [5]})


def test_proxy_volume_ordering_and_trend():
    r = _run(experiment="proxy", distribution=GAUSS, n=200, alpha=[0.1, 0.3], grid=SMALL_GRID, replicates=3)
    assert r["proxy_inclusion_verified"]
    for row in r["results"]:
        for rep in row["per_replicate"]:
            assert rep["proxy_volume"] <= rep["q_hat_volume"]
    assert r["trend"][0]["ratio_decreases_with_alpha"]


def test_proxy_zero_level():
    r = _run(experiment="proxy", distribution=GAUSS, n=40, alpha=0.1, grid=SMALL_GRID, beta=0.0)
    assert r["results"][0]["proxy_volume"] == 0.0


def test_contamination_invariance():
    r = _run(experiment="contamination", distribution=GAUSS, n=101, alpha=0.1,
             contamination={"fraction": 0.2, "magnitude": 1000.0, "probes": 10}, grid=SMALL_GRID)
    row = r["results"][0]
    assert row["magnitude_invariant"] and row["mask_magnitude_invariant"] and row["within_breakdown"]


def test_contamination_zero_fraction_is_clean():
    r = _run(experiment="contamination", distribution=GAUSS, n=21, alpha=0.1,
             contamination={"fraction": 0.0})
    row = r["results"][0]
    assert row["outliers"] == 0 and row["identical_to_clean"] and row["max_score_shift"] == 0.0


def test_outlier_helpers():
    assert outlier_count(0.2, 101) == 21
    assert outlier_count(0.2, 100) == 20
    clean = np.zeros((4, 2))
    out = contaminate(clean, [1, 3], [[1, 0], [0, -1]], 10.0, center=[1, 1])
    assert out.tolist() == [[0, 0], [11, 1], [0, 0], [1, -9]]
    assert clean.sum() == 0


@pytest.mark.parametrize("doc", [
    dict(experiment="coverage", distribution=GAUSS, n=[10, 20], alpha=[0.1, 0.2], trials=150),
    dict(experiment="consistency", distribution=GAUSS, n=[10, 30], alpha=0.1, trials=120,
         level_method="monte-carlo", mc_samples=500, delta_samples=300),
    dict(experiment="hausdorff", distribution=GAUSS, n=[30, 60], alpha=0.1, replicates=5,
         grid=SMALL_GRID, level_method="monte-carlo", mc_samples=2000),
    dict(experiment="proxy", distribution=GAUSS, n=50, alpha=[0.1, 0.3], replicates=4, grid=SMALL_GRID),
    dict(experiment="contamination", distribution=GAUSS, n=[31, 51], alpha=0.1, replicates=3),
])
def test_determinism_across_workers(doc):
    a = metrics_only(_run(**doc, workers=1))
    b = metrics_only(_run(**doc, workers=3))
    again = metrics_only(_run(**doc, workers=1))
    assert a == again
    assert a["results"] == b["results"] and a["series"] == b["series"]


def test_report_shape():
    r = _run(experiment="coverage", distribution=GAUSS, n=10, alpha=0.1, trials=100)
    assert {"experiment", "config", "results", "series", "provenance", "wall_clock_seconds"} <= set(r)
    assert r["provenance"]["backend"] in ("compiled", "python")
