"""Rectangular evaluation grids, boolean masks over them, and grid Hausdorff distance."""

from dataclasses import dataclass

import numpy as np
from scipy import ndimage


@dataclass(frozen=True)
class GridSpec:
    """Axis-aligned box sampled with ``counts[j]`` evenly spaced nodes per axis.

    Nodes are enumerated in C order (last axis varies fastest).
    """

    lower: tuple
    upper: tuple
    counts: tuple

    def __post_init__(self):
        lower = tuple(float(v) for v in np.atleast_1d(self.lower))
        upper = tuple(float(v) for v in np.atleast_1d(self.upper))
        counts = tuple(int(v) for v in np.atleast_1d(self.counts))
        if not (len(lower) == len(upper) == len(counts)) or not lower:
            raise ValueError("grid lower, upper and counts must have the same nonzero length")
        if any(c < 2 for c in counts):
            raise ValueError(f"grid needs at least 2 nodes per axis, got {counts}")
        if not all(np.isfinite(lower + upper)):
            raise ValueError("grid bounds must be finite")
        if any(lo >= hi for lo, hi in zip(lower, upper)):
            raise ValueError("grid lower bounds must be strictly below upper bounds")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "counts", counts)

    @classmethod
    def from_axes(cls, axes):
        """Build from ``[(lo, hi, count), ...]``."""
        lo, hi, cnt = zip(*axes)
        return cls(lo, hi, cnt)

    @property
    def dim(self):
        return len(self.counts)

    @property
    def size(self):
        return int(np.prod(self.counts))

    @property
    def shape(self):
        return self.counts

    @property
    def spacing(self):
        return tuple((hi - lo) / (c - 1) for lo, hi, c in zip(self.lower, self.upper, self.counts))

    @property
    def diagonal(self):
        """Length of one cell diagonal; twice the worst discretisation error."""
        return float(np.sqrt(sum(h * h for h in self.spacing)))

    @property
    def cell_volume(self):
        return float(np.prod(self.spacing))

    def axes(self):
        return [np.linspace(lo, hi, c) for lo, hi, c in zip(self.lower, self.upper, self.counts)]

    def nodes(self):
        """All node coordinates, shape ``(size, dim)``."""
        mesh = np.meshgrid(*self.axes(), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def point(self, j):
        idx = np.unravel_index(int(j), self.counts)
        return np.array([ax[i] for ax, i in zip(self.axes(), idx)])

    def to_dict(self):
        return {"lower": list(self.lower), "upper": list(self.upper), "counts": list(self.counts)}


def _check_mask(mask, grid):
    mask = np.asarray(mask, dtype=bool).ravel()
    if mask.size != grid.size:
        raise ValueError(f"mask has {mask.size} entries but the grid has {grid.size} nodes")
    return mask


def mask_volume_fraction(mask):
    mask = np.asarray(mask, dtype=bool)
    return float(np.count_nonzero(mask)) / mask.size


def directed_hausdorff_grid(mask_a, mask_b, grid):
    """``max_{a in A} min_{b in B} |a - b|`` over true nodes of two masks."""
    a = _check_mask(mask_a, grid)
    b = _check_mask(mask_b, grid)
    if not a.any() or not b.any():
        raise ValueError("Hausdorff distance is undefined for an empty mask")
    # exact Euclidean distance from every node to the nearest true node of B
    dist_to_b = ndimage.distance_transform_edt(~b.reshape(grid.shape), sampling=grid.spacing)
    return float(dist_to_b.ravel()[a].max())


def hausdorff_distance_grid(mask_a, mask_b, grid):
    """Symmetric Hausdorff distance between the true-node sets of two masks."""
    return max(
        directed_hausdorff_grid(mask_a, mask_b, grid),
        directed_hausdorff_grid(mask_b, mask_a, grid),
    )
