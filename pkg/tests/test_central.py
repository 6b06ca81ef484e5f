import numpy as np
import pytest

from halfmass.central import (
    certified_balls,
    cover_count,
    cover_counts,
    knn_local_radii,
    proxy_mask,
    proxy_membership,
    q_hat_brute_force,
    q_hat_mask,
    q_hat_membership,
    s_hat_mask,
    s_hat_membership,
)
from halfmass.geometry import half_mass_radius


@pytest.mark.parametrize("data, beta, y, expected", [
    ([[0], [1]], 0.5, [0.5], 2),
    ([[0], [1]], 0.5, [0], 1),
    ([[0]], 0.0, [0], 1),
])
def test_cover_count(data, beta, y, expected, each_backend):
    assert cover_count(y, data, beta) == expected


@pytest.mark.parametrize("data, beta, y, expected", [
    ([[0], [1]], 0.5, [0.5], True),
    ([[0], [1]], 0.5, [0], False),
    ([[3.5]], 0.0, [3.5], True),
    ([[3.5]], 7.0, [3.5], True),
])
def test_q_hat_membership(data, beta, y, expected):
    assert q_hat_membership(y, data, beta) is expected


@pytest.mark.parametrize("data, beta, y, expected", [
    ([[0], [1]], 0.5, [0], True),
    ([[0], [1], [2]], 1.0, [0.5], True),
    ([[2]], 0.0, [2], True),
])
def test_s_hat_membership(data, beta, y, expected):
    assert s_hat_membership(y, data, beta) is expected


@pytest.mark.parametrize("data, beta, y, expected", [
    ([[0], [1]], 0.5, [0.5], True),
    ([[0], [1]], 0.4, [0.5], False),
    ([[1]], 0.0, [1], True),
])
def test_q_hat_brute_force(data, beta, y, expected):
    assert q_hat_brute_force(y, data, beta) is expected


def test_brute_force_size_guard():
    with pytest.raises(ValueError, match="limited"):
        q_hat_brute_force([0], np.zeros((16, 1)), 1.0)


def test_negative_beta_rejected():
    with pytest.raises(ValueError):
        cover_count([0], [[0]], -1.0)


@pytest.mark.parametrize("data, k, expected", [
    ([[0], [1], [3]], 1, [1, 1, 2]),
    ([[0], [1], [3]], 2, [3, 2, 3]),
    ([[4], [4]], 1, [0, 0]),
])
def test_knn_local_radii(data, k, expected, each_backend):
    assert knn_local_radii(data, k).d_locals.tolist() == expected


def test_knn_local_radii_rank_range():
    with pytest.raises(ValueError):
        knn_local_radii([[0], [1]], 2)
    with pytest.raises(ValueError):
        knn_local_radii([[0]])


@pytest.mark.parametrize("y, expected", [([0.25], True), ([2.9], False)])
def test_proxy_membership(y, expected):
    assert proxy_membership(y, [[0], [1], [3]], 1.5, k=1) is expected


def test_proxy_empty_at_zero_level(rng):
    data = rng.normal(size=(20, 2))
    queries = rng.normal(size=(50, 2))
    assert not proxy_mask(queries, data, 0.0).any()
    centers, radii = certified_balls(data, 0.0)
    assert centers.shape == (0, 2) and radii.size == 0


def test_certified_ball_radii(rng):
    data = rng.normal(size=(15, 2))
    r = knn_local_radii(data, 3)
    centers, radii = certified_balls(data, 1.0, radii=r)
    keep = 1.0 > r.d_locals
    assert np.array_equal(centers, data[keep])
    assert np.array_equal(radii, 1.0 - r.d_locals[keep])


def test_masks_match_scalar_calls(rng, each_backend):
    data = rng.normal(size=(9, 2))
    queries = rng.normal(size=(40, 2))
    beta = 1.1
    assert q_hat_mask(queries, data, beta).tolist() == [q_hat_membership(q, data, beta) for q in queries]
    assert s_hat_mask(queries, data, beta).tolist() == [s_hat_membership(q, data, beta) for q in queries]
    assert cover_counts(queries, data, beta).tolist() == [cover_count(q, data, beta) for q in queries]


def test_q_hat_is_half_mass_sublevel_set_at_the_boundary(rng):
    # probes placed exactly at their own half-mass radius
    data = rng.normal(size=(11, 3))
    for q in rng.normal(size=(30, 3)):
        r = half_mass_radius(q, data)
        assert q_hat_membership(q, data, r)
        assert not q_hat_membership(q, data, np.nextafter(r, 0))
