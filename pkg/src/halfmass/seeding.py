"""Deterministic RNG streams and order-preserving parallel trial execution.

Every trial draws from its own stream keyed by ``(seed, *key, trial)``, so
results do not depend on how trials are split across workers.
"""

from concurrent.futures import ProcessPoolExecutor

import numpy as np


def stream(seed, *key):
    """Independent ``Generator`` for the stream identified by ``key``."""
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key)))


def _chunks(n_items, n_parts):
    bounds = np.linspace(0, n_items, n_parts + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]


def run_trials(func, n_trials, workers=1, args=()):
    """Evaluate ``func(start, stop, *args)`` over contiguous trial blocks.

    ``func`` must return a list with one entry per trial in ``range(start,
    stop)``. Blocks are concatenated in trial order, so the result is
    identical for any ``workers``.
    """
    workers = max(1, int(workers))
    if workers == 1 or n_trials < 2:
        return list(func(0, n_trials, *args))
    blocks = _chunks(n_trials, min(workers * 4, n_trials))
    out = []
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(func, a, b, *args) for a, b in blocks]
        for fut in futures:
            out.extend(fut.result())
    return out
