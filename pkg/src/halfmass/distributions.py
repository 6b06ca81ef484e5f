"""Samplable reference distributions.

Each distribution knows how to draw i.i.d. samples from a numpy
``Generator`` and, where a closed form exists, the mass of a closed ball
``P(B(x, r))``. Distributions round-trip through plain dicts so they can be
written into JSON configs and reports.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import special, stats


class DistributionError(ValueError):
    pass


def _vec(value, name):
    arr = np.atleast_1d(np.asarray(value, dtype=np.float64))
    if arr.ndim != 1 or arr.size == 0 or not np.all(np.isfinite(arr)):
        raise DistributionError(f"{name} must be a nonempty finite vector")
    return arr


class Distribution:
    kind = ""

    @property
    def dim(self):
        raise NotImplementedError

    def sample(self, n, rng):
        raise NotImplementedError

    def ball_mass(self, x, r):
        """Closed-form ``P(B(x, r))`` or ``None`` when unavailable."""
        return None

    def to_dict(self):
        raise NotImplementedError

    def scale_hint(self):
        """(center, scale) used to size default bounding boxes."""
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class PointMass(Distribution):
    center: np.ndarray
    kind = "point-mass"

    def __post_init__(self):
        object.__setattr__(self, "center", _vec(self.center, "center"))

    @property
    def dim(self):
        return self.center.size

    def sample(self, n, rng):
        return np.tile(self.center, (n, 1))

    def ball_mass(self, x, r):
        return float(np.linalg.norm(x - self.center) <= r)

    def to_dict(self):
        return {"kind": self.kind, "center": self.center.tolist()}

    def scale_hint(self):
        return self.center, 1.0


@dataclass(frozen=True, eq=False)
class UniformInterval(Distribution):
    low: float
    high: float
    kind = "uniform-interval"

    def __post_init__(self):
        if not (np.isfinite(self.low) and np.isfinite(self.high) and self.low < self.high):
            raise DistributionError("uniform-interval needs finite low < high")
        object.__setattr__(self, "low", float(self.low))
        object.__setattr__(self, "high", float(self.high))

    @property
    def dim(self):
        return 1

    def sample(self, n, rng):
        return rng.uniform(self.low, self.high, size=(n, 1))

    def ball_mass(self, x, r):
        x = float(np.asarray(x).ravel()[0])
        covered = min(x + r, self.high) - max(x - r, self.low)
        return max(covered, 0.0) / (self.high - self.low)

    def to_dict(self):
        return {"kind": self.kind, "low": self.low, "high": self.high}

    def scale_hint(self):
        return np.array([(self.low + self.high) / 2]), (self.high - self.low) / 2


def _cap_fraction(u, d):
    """Fraction of a unit d-ball beyond a plane at signed distance ``u``."""
    u = min(max(u, -1.0), 1.0)
    half = 0.5 * special.betainc((d + 1) / 2, 0.5, 1.0 - u * u)
    return half if u >= 0 else 1.0 - half


@dataclass(frozen=True, eq=False)
class UniformBall(Distribution):
    center: np.ndarray
    radius: float
    kind = "uniform-ball"

    def __post_init__(self):
        object.__setattr__(self, "center", _vec(self.center, "center"))
        if not (np.isfinite(self.radius) and self.radius > 0):
            raise DistributionError("uniform-ball radius must be positive")
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def dim(self):
        return self.center.size

    def sample(self, n, rng):
        d = self.dim
        g = rng.standard_normal((n, d))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        rad = self.radius * rng.random(n) ** (1.0 / d)
        return self.center + g * rad[:, None]

    def ball_mass(self, x, r):
        d, big = self.dim, self.radius
        t = float(np.linalg.norm(np.asarray(x) - self.center))
        if r <= 0:
            return 0.0
        if t + r <= big:
            return (r / big) ** d
        if r >= t + big:
            return 1.0
        if t >= r + big:
            return 0.0
        # lens = cap of B(x, r) + cap of B(c, R), split by the radical plane
        a1 = (t * t + r * r - big * big) / (2 * t)
        a2 = (t * t + big * big - r * r) / (2 * t)
        lens = r**d * _cap_fraction(a1 / r, d) + big**d * _cap_fraction(a2 / big, d)
        return min(1.0, lens / big**d)

    def to_dict(self):
        return {"kind": self.kind, "center": self.center.tolist(), "radius": self.radius}

    def scale_hint(self):
        return self.center, self.radius


@dataclass(frozen=True, eq=False)
class Gaussian(Distribution):
    mean: np.ndarray
    cov: np.ndarray
    kind = "gaussian"
    _chol: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        mean = _vec(self.mean, "mean")
        cov = np.asarray(self.cov, dtype=np.float64)
        if cov.ndim == 0:
            cov = cov * np.eye(mean.size)
        if cov.shape != (mean.size, mean.size) or not np.all(np.isfinite(cov)):
            raise DistributionError("gaussian covariance must be a d x d finite matrix")
        if not np.allclose(cov, cov.T):
            raise DistributionError("gaussian covariance must be symmetric")
        try:
            chol = np.linalg.cholesky(cov)
        except np.linalg.LinAlgError:
            raise DistributionError("gaussian covariance must be positive definite") from None
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)
        object.__setattr__(self, "_chol", chol)

    @classmethod
    def standard(cls, d):
        return cls(np.zeros(d), np.eye(d))

    @property
    def dim(self):
        return self.mean.size

    @property
    def isotropic_scale(self):
        """``sigma`` when the covariance is ``sigma^2 I``, else ``None``."""
        s2 = self.cov[0, 0]
        if np.array_equal(self.cov, s2 * np.eye(self.dim)):
            return float(np.sqrt(s2))
        return None

    def sample(self, n, rng):
        return self.mean + rng.standard_normal((n, self.dim)) @ self._chol.T

    def ball_mass(self, x, r):
        sigma = self.isotropic_scale
        if sigma is None:
            return None
        rho2 = float(np.sum(((np.asarray(x) - self.mean) / sigma) ** 2))
        return float(stats.ncx2.cdf((r / sigma) ** 2, self.dim, rho2)) if rho2 > 0 else float(
            stats.chi2.cdf((r / sigma) ** 2, self.dim)
        )

    def to_dict(self):
        return {"kind": self.kind, "mean": self.mean.tolist(), "cov": self.cov.tolist()}

    def scale_hint(self):
        return self.mean, float(np.sqrt(np.max(np.diag(self.cov))))


@dataclass(frozen=True, eq=False)
class GaussianMixture(Distribution):
    weights: np.ndarray
    components: tuple
    kind = "gaussian-mixture"

    def __post_init__(self):
        w = _vec(self.weights, "weights")
        comps = tuple(self.components)
        if len(comps) != w.size or not comps:
            raise DistributionError("one weight per mixture component is required")
        if np.any(w < 0) or not np.isclose(w.sum(), 1.0):
            raise DistributionError("mixture weights must be nonnegative and sum to 1")
        if not all(isinstance(c, Gaussian) for c in comps):
            raise DistributionError("mixture components must be gaussian")
        if len({c.dim for c in comps}) != 1:
            raise DistributionError("mixture components must share a dimension")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "components", comps)

    @property
    def dim(self):
        return self.components[0].dim

    def sample(self, n, rng):
        labels = rng.choice(len(self.components), size=n, p=self.weights)
        out = np.empty((n, self.dim))
        for j, comp in enumerate(self.components):
            idx = np.flatnonzero(labels == j)
            out[idx] = comp.sample(idx.size, rng)
        return out

    def to_dict(self):
        return {
            "kind": self.kind,
            "weights": self.weights.tolist(),
            "components": [c.to_dict() for c in self.components],
        }

    def scale_hint(self):
        means = np.array([c.mean for c in self.components])
        center = self.weights @ means
        spread = max(float(np.max(np.abs(m - center))) + c.scale_hint()[1]
                     for m, c in zip(means, self.components))
        return center, spread


@dataclass(frozen=True, eq=False)
class StudentT(Distribution):
    """Multivariate Student-t with identity shape matrix, scaled and shifted."""

    df: float
    loc: np.ndarray
    scale: float = 1.0
    kind = "student-t"

    def __post_init__(self):
        if not (np.isfinite(self.df) and self.df > 0):
            raise DistributionError("student-t df must be positive")
        if not (np.isfinite(self.scale) and self.scale > 0):
            raise DistributionError("student-t scale must be positive")
        object.__setattr__(self, "df", float(self.df))
        object.__setattr__(self, "loc", _vec(self.loc, "loc"))
        object.__setattr__(self, "scale", float(self.scale))

    @property
    def dim(self):
        return self.loc.size

    def sample(self, n, rng):
        z = rng.standard_normal((n, self.dim))
        w = rng.chisquare(self.df, size=n)
        return self.loc + self.scale * z / np.sqrt(w / self.df)[:, None]

    def ball_mass(self, x, r):
        if self.dim == 1:
            lo = (float(np.asarray(x).ravel()[0]) - r - self.loc[0]) / self.scale
            hi = (float(np.asarray(x).ravel()[0]) + r - self.loc[0]) / self.scale
            return float(stats.t.cdf(hi, self.df) - stats.t.cdf(lo, self.df))
        return None

    def to_dict(self):
        return {"kind": self.kind, "df": self.df, "loc": self.loc.tolist(), "scale": self.scale}

    def scale_hint(self):
        return self.loc, self.scale * 2.0


@dataclass(frozen=True, eq=False)
class Sphere(Distribution):
    """Uniform on the sphere of given radius (two points ``c +- radius`` in 1-D)."""

    center: np.ndarray
    radius: float
    kind = "sphere"

    def __post_init__(self):
        object.__setattr__(self, "center", _vec(self.center, "center"))
        if not (np.isfinite(self.radius) and self.radius >= 0):
            raise DistributionError("sphere radius must be nonnegative")
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def dim(self):
        return self.center.size

    def sample(self, n, rng):
        g = rng.standard_normal((n, self.dim))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        return self.center + self.radius * g

    def to_dict(self):
        return {"kind": self.kind, "center": self.center.tolist(), "radius": self.radius}

    def scale_hint(self):
        return self.center, self.radius


@dataclass(frozen=True, eq=False)
class Contaminated(Distribution):
    """Huber mixture ``(1 - fraction) * base + fraction * outlier``."""

    base: Distribution
    fraction: float
    outlier: Distribution
    kind = "contaminated"

    def __post_init__(self):
        if not 0 <= self.fraction < 0.5:
            raise DistributionError("contamination fraction must satisfy 0 <= fraction < 1/2")
        if self.base.dim != self.outlier.dim:
            raise DistributionError("base and outlier distributions must share a dimension")
        object.__setattr__(self, "fraction", float(self.fraction))

    @property
    def dim(self):
        return self.base.dim

    def sample(self, n, rng):
        flip = rng.random(n) < self.fraction
        clean = self.base.sample(n, rng)
        dirty = self.outlier.sample(n, rng)
        return np.where(flip[:, None], dirty, clean)

    def to_dict(self):
        return {
            "kind": self.kind,
            "base": self.base.to_dict(),
            "fraction": self.fraction,
            "outlier": self.outlier.to_dict(),
        }

    def scale_hint(self):
        return self.base.scale_hint()


_KEYS = {
    "point-mass": {"center"},
    "uniform-interval": {"low", "high"},
    "uniform-ball": {"center", "radius"},
    "gaussian": {"mean", "cov", "dim"},
    "gaussian-mixture": {"weights", "components"},
    "student-t": {"df", "loc", "scale", "dim"},
    "sphere": {"center", "radius"},
    "contaminated": {"base", "fraction", "outlier"},
}


def from_dict(spec):
    """Build a distribution from its dict form; unknown keys are rejected.

    A ``gaussian`` given only ``dim`` is standard normal; ``mean`` alone
    means identity covariance. A ``student-t`` given only ``dim`` is
    centred at the origin.
    """
    if isinstance(spec, Distribution):
        return spec
    if not isinstance(spec, dict) or "kind" not in spec:
        raise DistributionError("distribution spec must be an object with a 'kind'")
    kind = spec["kind"]
    if kind not in _KEYS:
        raise DistributionError(f"unknown distribution kind {kind!r}; expected one of {sorted(_KEYS)}")
    extra = set(spec) - _KEYS[kind] - {"kind"}
    if extra:
        raise DistributionError(f"unknown keys for {kind}: {sorted(extra)}")
    try:
        if kind == "point-mass":
            return PointMass(spec["center"])
        if kind == "uniform-interval":
            return UniformInterval(spec["low"], spec["high"])
        if kind == "uniform-ball":
            return UniformBall(spec["center"], spec["radius"])
        if kind == "gaussian":
            if "mean" in spec:
                mean = np.atleast_1d(np.asarray(spec["mean"], dtype=float))
            else:
                mean = np.zeros(int(spec["dim"]))
            return Gaussian(mean, spec.get("cov", np.eye(mean.size)))
        if kind == "gaussian-mixture":
            comps = [from_dict(c) for c in spec["components"]]
            return GaussianMixture(spec["weights"], comps)
        if kind == "student-t":
            loc = spec["loc"] if "loc" in spec else np.zeros(int(spec["dim"]))
            return StudentT(spec["df"], loc, spec.get("scale", 1.0))
        if kind == "sphere":
            return Sphere(spec["center"], spec["radius"])
        return Contaminated(from_dict(spec["base"]), spec["fraction"], from_dict(spec["outlier"]))
    except KeyError as exc:
        raise DistributionError(f"{kind} is missing required key {exc.args[0]!r}") from None


def sample(dist, n, seed):
    """Draw ``n`` i.i.d. points; deterministic in ``(dist, n, seed)``.

    ``seed`` may be an int, a ``SeedSequence`` or a ``Generator``.
    """
    n = int(n)
    if n < 0:
        raise ValueError("sample size must be nonnegative")
    dist = from_dict(dist)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return np.ascontiguousarray(dist.sample(n, rng).reshape(n, dist.dim), dtype=np.float64)
