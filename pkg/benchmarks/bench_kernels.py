"""Compare the compiled kernels with the numpy fallback.

Usage::

    python3 benchmarks/bench_kernels.py [--repeat 5] [--quick]

Each row reports the best wall-clock time over ``--repeat`` runs for both
backends and checks that their outputs agree exactly.
"""

import argparse
import timeit

import numpy as np

from halfmass import _pykernels, kernels


def workloads(rng, quick):
    scale = 4 if quick else 1
    n, m, d = 1000 // scale, 40000 // scale, 2
    pts = rng.standard_normal((n, d))
    nodes = rng.uniform(-4, 4, size=(m, d))
    k = n // 2 + 1
    lo, hi = _pykernels.others_pair_sq(pts, k)
    radii = rng.uniform(0, 0.2, size=n) ** 2
    return [
        (f"kth_sq  n={n} m={m}", "kth_sq", (pts, nodes, k)),
        (f"others_pair_sq n={n}", "others_pair_sq", (pts, k)),
        (f"pvalue_counts n={n} m={m}", "pvalue_counts", (pts, lo, hi, nodes, k)),
        (f"cover_counts n={n} m={m}", "cover_counts", (pts, nodes, 1.5)),
        (f"any_within n={n} m={m}", "any_within", (pts, radii, nodes)),
    ]


def _same(a, b):
    if isinstance(a, tuple):
        return all(np.array_equal(x, y) for x, y in zip(a, b))
    return np.array_equal(a, b)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--quick", action="store_true", help="smaller inputs")
    args = parser.parse_args(argv)
    if "compiled" not in kernels.available_backends():
        raise SystemExit("compiled extension is not built; run `pip install -e . --no-build-isolation`")
    from halfmass import _ckernels

    rng = np.random.default_rng(0)
    print(f"{'kernel':34s} {'compiled s':>11s} {'python s':>10s} {'speedup':>8s}  match")
    for label, name, call_args in workloads(rng, args.quick):
        fc, fp = getattr(_ckernels, name), getattr(_pykernels, name)
        tc = min(timeit.repeat(lambda: fc(*call_args), number=1, repeat=args.repeat))
        tp = min(timeit.repeat(lambda: fp(*call_args), number=1, repeat=args.repeat))
        match = _same(fc(*call_args), fp(*call_args))
        print(f"{label:34s} {tc:11.4f} {tp:10.4f} {tp / tc:7.1f}x  {'yes' if match else 'NO'}")


if __name__ == "__main__":
    main()
