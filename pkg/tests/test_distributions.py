import numpy as np
import pytest

from halfmass.distributions import (
    DistributionError,
    Gaussian,
    PointMass,
    UniformBall,
    UniformInterval,
    from_dict,
    sample,
)


def test_point_mass_sample():
    assert sample(PointMass([0]), 3, 0).tolist() == [[0], [0], [0]]


def test_uniform_interval_mean():
    xs = sample(UniformInterval(0, 1), 10**4, 42)
    assert abs(xs.mean() - 0.5) < 0.02
    assert xs.min() >= 0 and xs.max() <= 1


def test_contaminated_outlier_count():
    spec = {"kind": "contaminated", "fraction": 0.2,
            "base": {"kind": "gaussian", "dim": 2},
            "outlier": {"kind": "sphere", "center": [0, 0], "radius": 100}}
    xs = sample(from_dict(spec), 100, 3)
    far = int(np.sum(np.linalg.norm(xs, axis=1) > 50))
    # binomial(100, 0.2): mean 20, sd 4
    assert 8 <= far <= 32


def test_contamination_beyond_breakdown_rejected():
    with pytest.raises((DistributionError, ValueError)):
        from_dict({"kind": "contaminated", "fraction": 0.6,
                   "base": {"kind": "gaussian", "dim": 1},
                   "outlier": {"kind": "point-mass", "center": [9]}})


def test_sampling_is_deterministic():
    g = Gaussian.standard(3)
    assert np.array_equal(sample(g, 50, 7), sample(g, 50, 7))
    assert not np.array_equal(sample(g, 50, 7), sample(g, 50, 8))


@pytest.mark.parametrize("spec", [
    {"kind": "point-mass", "center": [1, 2]},
    {"kind": "uniform-interval", "low": -1, "high": 2},
    {"kind": "uniform-ball", "center": [0, 0, 0], "radius": 2},
    {"kind": "gaussian", "dim": 2},
    {"kind": "student-t", "df": 3, "dim": 1},
    {"kind": "sphere", "center": [0, 0], "radius": 5},
])
def test_round_trip(spec):
    dist = from_dict(spec)
    again = from_dict(dist.to_dict())
    assert np.array_equal(sample(dist, 20, 1), sample(again, 20, 1))


@pytest.mark.parametrize("spec", [
    {"kind": "banana"},
    {"kind": "gaussian", "dim": 2, "colour": "red"},
    {"kind": "uniform-interval", "low": 1},
    "gaussian",
])
def test_bad_specs(spec):
    with pytest.raises(DistributionError):
        from_dict(spec)


def test_uniform_ball_samples_inside(rng):
    xs = UniformBall([1, 1], 2).sample(2000, rng)
    assert np.all(np.linalg.norm(xs - 1, axis=1) <= 2)


@pytest.mark.parametrize("dist, x, r", [
    (Gaussian.standard(2), [0.5, -0.2], 1.3),
    (UniformBall([0, 0], 1.0), [0.7, 0.0], 0.6),
    (UniformBall([0, 0, 0], 1.0), [0.2, 0.3, 0.0], 0.9),
])
def test_ball_mass_against_sampling(dist, x, r):
    xs = dist.sample(200_000, np.random.default_rng(5))
    frac = np.mean(np.linalg.norm(xs - np.asarray(x), axis=1) <= r)
    assert dist.ball_mass(np.asarray(x, dtype=float), r) == pytest.approx(frac, abs=0.005)
