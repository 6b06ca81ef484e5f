"""Experiment configuration documents.

A config is a single JSON object. Unknown keys are rejected and every
problem is reported as a :class:`ConfigError` naming the offending field.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .distributions import Distribution, DistributionError, from_dict
from .grid import GridSpec

EXPERIMENTS = ("coverage", "consistency", "hausdorff", "proxy", "contamination")
LEVEL_METHODS = ("auto", "analytic", "monte-carlo")

# desk-scale ceilings; raise them explicitly with "allow_large": true
MAX_N = 1000
MAX_TRIALS = 5000
MAX_GRID_NODES = 400 * 400
# nodes per axis of the default grid, by dimension
DEFAULT_GRID_COUNTS = {1: 2001, 2: 200, 3: 41}


class ConfigError(ValueError):
    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


@dataclass
class Contamination:
    fraction: float = 0.2
    magnitude: float = 1e3
    probes: int = 10


@dataclass
class ExperimentConfig:
    experiment: str
    distribution: Distribution
    n: list
    alpha: list
    seed: int
    trials: int = 1000
    replicates: int = 1
    grid: GridSpec | None = None
    mc_samples: int = 10**5
    delta_samples: int = 10**4
    level_method: str = "auto"
    beta: float | None = None
    k: int | None = None
    contamination: Contamination = field(default_factory=Contamination)
    workers: int = 1
    out: str | None = None
    allow_large: bool = False

    def to_dict(self):
        """Canonical echo of the config, suitable for re-running."""
        doc = {
            "experiment": self.experiment,
            "distribution": self.distribution.to_dict(),
            "n": list(self.n),
            "alpha": list(self.alpha),
            "seed": self.seed,
            "trials": self.trials,
            "replicates": self.replicates,
            "grid": self.grid.to_dict() if self.grid else None,
            "mc_samples": self.mc_samples,
            "delta_samples": self.delta_samples,
            "level_method": self.level_method,
            "beta": self.beta,
            "k": self.k,
            "contamination": vars(self.contamination).copy(),
            "workers": self.workers,
            "allow_large": self.allow_large,
        }
        return doc


_KEYS = {
    "command", "experiment", "distribution", "n", "alpha", "seed", "trials", "replicates",
    "grid", "mc_samples", "delta_samples", "level_method", "beta", "k", "contamination",
    "workers", "out", "allow_large",
}
_DEFAULT_REPLICATES = {"hausdorff": 20, "proxy": 1, "contamination": 1}


def _int(doc, key, minimum, default=None):
    value = doc.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(key, f"must be an integer, got {value!r}")
    if value < minimum:
        raise ConfigError(key, f"must be at least {minimum}, got {value}")
    return value


def _real(value, key):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigError(key, f"must be a finite number, got {value!r}")
    return float(value)


def _list(doc, key):
    value = doc[key]
    return list(value) if isinstance(value, (list, tuple)) else [value]


def parse_grid(spec, key="grid"):
    if not isinstance(spec, dict):
        raise ConfigError(key, "must be an object with lower, upper and counts")
    extra = set(spec) - {"lower", "upper", "counts"}
    if extra:
        raise ConfigError(key, f"unknown keys {sorted(extra)}")
    try:
        return GridSpec(spec["lower"], spec["upper"], spec["counts"])
    except KeyError as exc:
        raise ConfigError(key, f"missing {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        raise ConfigError(key, str(exc)) from None


def default_grid(dist, half_width=4.0):
    """Box ``center +- half_width * scale`` per axis around the distribution."""
    if dist.dim not in DEFAULT_GRID_COUNTS:
        raise ConfigError("grid", f"no default grid in dimension {dist.dim}; give one explicitly")
    center, scale = dist.scale_hint()
    center = np.asarray(center, dtype=np.float64).ravel()
    scale = float(scale) if scale > 0 else 1.0
    count = DEFAULT_GRID_COUNTS[dist.dim]
    return GridSpec(center - half_width * scale, center + half_width * scale, [count] * dist.dim)


def parse_config(doc):
    """Validate a config dict and return an :class:`ExperimentConfig`."""
    if not isinstance(doc, dict):
        raise ConfigError("<root>", "config must be a JSON object")
    unknown = set(doc) - _KEYS
    if unknown:
        raise ConfigError(sorted(unknown)[0], "unknown key")
    if doc.get("command", "experiment") != "experiment":
        raise ConfigError("command", "only 'experiment' configs are accepted here")
    for key in ("experiment", "distribution", "n", "alpha", "seed"):
        if key not in doc:
            raise ConfigError(key, "required field is missing")
    kind = doc["experiment"]
    if kind not in EXPERIMENTS:
        raise ConfigError("experiment", f"must be one of {list(EXPERIMENTS)}, got {kind!r}")
    try:
        dist = from_dict(doc["distribution"])
    except DistributionError as exc:
        raise ConfigError("distribution", str(exc)) from None

    seed = _int(doc, "seed", 0)
    allow_large = bool(doc.get("allow_large", False))
    ns = _list(doc, "n")
    for v in ns:
        if isinstance(v, bool) or not isinstance(v, int) or v < 1:
            raise ConfigError("n", f"sample sizes must be positive integers, got {v!r}")
        if v > MAX_N and not allow_large:
            raise ConfigError("n", f"{v} exceeds the desk-scale limit {MAX_N}; set allow_large")
    if not ns:
        raise ConfigError("n", "at least one sample size is required")
    if kind == "consistency" and len(ns) < 2:
        raise ConfigError("n", "consistency needs at least two sample sizes")
    alphas = [_real(a, "alpha") for a in _list(doc, "alpha")]
    if not alphas or any(not 0 < a < 1 for a in alphas):
        raise ConfigError("alpha", "every alpha must lie in (0, 1)")

    trials = _int(doc, "trials", 100, 1000)
    if trials > MAX_TRIALS and not allow_large:
        raise ConfigError("trials", f"{trials} exceeds the desk-scale limit {MAX_TRIALS}; set allow_large")
    replicates = _int(doc, "replicates", 1, _DEFAULT_REPLICATES.get(kind, 1))

    grid = None
    if doc.get("grid") is not None:
        grid = parse_grid(doc["grid"])
        if grid.dim != dist.dim:
            raise ConfigError("grid", f"grid dimension {grid.dim} does not match distribution dimension {dist.dim}")
        if grid.size > MAX_GRID_NODES and not allow_large:
            raise ConfigError("grid", f"{grid.size} nodes exceed the desk-scale limit {MAX_GRID_NODES}")
    if kind in ("hausdorff", "proxy") and grid is None:
        grid = default_grid(dist)

    level_method = doc.get("level_method", "auto")
    if level_method not in LEVEL_METHODS:
        raise ConfigError("level_method", f"must be one of {list(LEVEL_METHODS)}")

    beta = doc.get("beta")
    if beta is not None:
        beta = _real(beta, "beta")
        if beta < 0:
            raise ConfigError("beta", "must be nonnegative")
    k = doc.get("k")
    if k is not None:
        k = _int(doc, "k", 1)
        if k > min(ns) - 1:
            raise ConfigError("k", f"local rank must be at most n-1 = {min(ns) - 1}")

    cont = Contamination()
    if "contamination" in doc:
        spec = doc["contamination"]
        if not isinstance(spec, dict):
            raise ConfigError("contamination", "must be an object")
        extra = set(spec) - {"fraction", "magnitude", "probes"}
        if extra:
            raise ConfigError("contamination", f"unknown keys {sorted(extra)}")
        cont = Contamination(
            fraction=_real(spec.get("fraction", cont.fraction), "contamination.fraction"),
            magnitude=_real(spec.get("magnitude", cont.magnitude), "contamination.magnitude"),
            probes=_int(spec, "probes", 1, cont.probes),
        )
        if not 0 <= cont.fraction < 0.5:
            raise ConfigError("contamination.fraction", "must satisfy 0 <= fraction < 1/2 (breakdown threshold)")
        if cont.magnitude <= 0:
            raise ConfigError("contamination.magnitude", "must be positive")

    return ExperimentConfig(
        experiment=kind,
        distribution=dist,
        n=ns,
        alpha=alphas,
        seed=seed,
        trials=trials,
        replicates=replicates,
        grid=grid,
        mc_samples=_int(doc, "mc_samples", 100, 10**5),
        delta_samples=_int(doc, "delta_samples", 1, 10**4),
        level_method=level_method,
        beta=beta,
        k=k,
        contamination=cont,
        workers=_int(doc, "workers", 1, 1),
        out=doc.get("out"),
        allow_large=allow_large,
    )


def load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError("<file>", f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return parse_config(doc)
