"""Robust conformal prediction with the half-mass radius (majority k-NN) score."""

__version__ = "0.1.0"

from .central import (
    ProxyRadii,
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
from .conformal import (
    ConformalConfig,
    ConformalScorer,
    brute_force_score,
    conformal_p_value,
    leave_one_out_scores,
    nonconformity_score,
    region_membership,
    region_on_grid,
)
from .distributions import from_dict as distribution_from_dict
from .distributions import sample
from .geometry import (
    MajorityRank,
    euclidean_distance,
    half_mass_radii,
    half_mass_radius,
    kth_nn_radii,
    kth_nn_radius,
    majority_rank,
)
from .grid import GridSpec, hausdorff_distance_grid
from .kernels import backend, use_backend
from .population import (
    PopulationLevel,
    beta_alpha,
    delta_p,
    q_population_mask,
    q_population_membership,
    sym_diff_probability,
)
