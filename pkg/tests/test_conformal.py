from fractions import Fraction

import numpy as np
import pytest

from halfmass.conformal import (
    ConformalConfig,
    ConformalScorer,
    bag_scores_direct,
    brute_force_score,
    conformal_p_value,
    leave_one_out_scores,
    nonconformity_score,
    region_membership,
    region_on_grid,
)
from halfmass.grid import GridSpec


@pytest.mark.parametrize("bag, z, expected", [
    ([[4]], [1], 3.0),
    ([[0], [2]], [0], 2.0),
    ([[-1], [1], [3]], [0], 1.0),
    ([[7]], [7], 0.0),
])
def test_score_and_brute_force(bag, z, expected):
    assert nonconformity_score(bag, z) == expected
    assert brute_force_score(bag, z) == expected


def test_brute_force_size_guard():
    with pytest.raises(ValueError, match="limited"):
        brute_force_score(np.zeros((21, 1)), [0])


@pytest.mark.parametrize("data, z, expected", [
    ([[0]], [0], [0, 0]),
    ([[0], [10]], [5], [10, 10, 5]),
    ([[0], [10]], [20], [20, 10, 20]),
])
def test_leave_one_out_scores(data, z, expected, each_backend):
    assert leave_one_out_scores(data, z).tolist() == expected


@pytest.mark.parametrize("data, z, expected", [
    ([[0]], [0], Fraction(1)),
    ([[0], [10]], [5], Fraction(1)),
    ([[0], [10]], [20], Fraction(2, 3)),
])
def test_p_value(data, z, expected, each_backend):
    assert conformal_p_value(data, z) == expected


@pytest.mark.parametrize("data, z, alpha, expected", [
    ([[0], [10]], [20], 0.5, True),
    ([[0], [10]], [20], 0.7, False),
    ([[0]], [0], 0.99, True),
])
def test_region_membership(data, z, alpha, expected):
    assert region_membership(data, z, ConformalConfig(alpha)) is expected


def test_p_value_equal_to_alpha_is_excluded():
    # p = 1/4 exactly; membership needs p > alpha
    data = [[0], [1], [2]]
    assert conformal_p_value(data, [100]) == Fraction(1, 4)
    assert not region_membership(data, [100], 0.25)
    assert ConformalScorer(data).contains([[100]], 0.25).tolist() == [False]
    assert region_membership(data, [100], 0.2499)


@pytest.mark.parametrize("alpha", [0.0, 1.0, -0.1, 1.2])
def test_alpha_out_of_range(alpha):
    with pytest.raises(ValueError):
        ConformalConfig(alpha)


def test_region_on_grid_is_pointwise():
    grid = GridSpec([-1], [1], [3])
    mask = region_on_grid([[0]], grid, ConformalConfig(0.5))
    expected = [region_membership([[0]], [x], 0.5) for x in (-1, 0, 1)]
    assert mask.tolist() == expected


def test_region_on_grid_two_nodes():
    grid = GridSpec([5], [20], [2])
    assert region_on_grid([[0], [10]], grid, 0.5).tolist() == [True, True]


def test_region_on_grid_dimension_mismatch():
    with pytest.raises(ValueError):
        region_on_grid([[0, 0]], GridSpec([0], [1], [3]), 0.5)


def test_fast_scores_match_explicit_bags(rng, each_backend):
    for _ in range(60):
        n = int(rng.integers(1, 14))
        d = int(rng.integers(1, 4))
        data = rng.normal(size=(n, d))
        if rng.random() < 0.3:
            data = np.round(data)  # force ties
        z = rng.normal(size=d)
        fast = leave_one_out_scores(data, z) ** 2
        ref = bag_scores_direct(data, z)
        assert np.array_equal(np.sqrt(fast), np.sqrt(ref))
        scorer = ConformalScorer(data)
        count = int(np.sum(ref >= ref[-1]))
        assert scorer.p_value(z) == Fraction(count, n + 1)


def test_p_values_vectorised(rng):
    data = rng.normal(size=(30, 2))
    zs = rng.normal(size=(25, 2))
    scorer = ConformalScorer(data)
    assert np.array_equal(scorer.p_values(zs), [float(scorer.p_value(z)) for z in zs])


def test_far_candidate_has_minimal_p_value():
    data = np.array([[0.0], [1.0], [2.0], [3.0], [100.0]])
    scorer = ConformalScorer(data)
    assert scorer.p_value([1000.0]) == Fraction(1, 6)


def test_empirical_level_infinite_for_small_n():
    # rank ceil(0.9 * 3) = 3 > n = 2
    assert ConformalScorer([[0], [1]]).empirical_level(0.1) == float("inf")
