import subprocess
import sys

import numpy as np
import pytest

from halfmass import _pykernels, kernels


needs_compiled = pytest.mark.skipif("compiled" not in kernels.available_backends(),
                                    reason="compiled extension not built")


def _cases(rng, count=100):
    for _ in range(count):
        n = int(rng.integers(2, 40))
        d = int(rng.integers(1, 5))
        pts = rng.normal(size=(n, d))
        if rng.random() < 0.3:
            pts = np.round(pts)
        qs = rng.normal(size=(int(rng.integers(0, 30)), d))
        yield pts, qs, int(rng.integers(1, n + 1))


@needs_compiled
def test_parity(rng):
    from halfmass import _ckernels as c
    for pts, qs, k in _cases(rng):
        assert np.array_equal(c.kth_sq(pts, qs, k), _pykernels.kth_sq(pts, qs, k))
        ko = min(k, pts.shape[0] - 1)
        lo_c, hi_c = c.others_pair_sq(pts, ko)
        lo_p, hi_p = _pykernels.others_pair_sq(pts, ko)
        assert np.array_equal(lo_c, lo_p) and np.array_equal(hi_c, hi_p)
        kk = pts.shape[0] // 2 + 1
        lo, hi = _pykernels.others_pair_sq(pts, kk)
        assert np.array_equal(c.pvalue_counts(pts, lo, hi, qs, kk), _pykernels.pvalue_counts(pts, lo, hi, qs, kk))
        thr = float(rng.uniform(0, 3))
        assert np.array_equal(c.cover_counts(pts, qs, thr), _pykernels.cover_counts(pts, qs, thr))
        radii = rng.uniform(0, 2, size=pts.shape[0])
        assert np.array_equal(c.any_within(pts, radii, qs), _pykernels.any_within(pts, radii, qs))


def test_switch_backend():
    prev = kernels.use_backend("python")
    try:
        assert kernels.backend() == "python"
    finally:
        kernels.use_backend(prev)
    assert kernels.backend() == prev
    with pytest.raises(ValueError):
        kernels.use_backend("fortran")


def test_fallback_selected_without_extension():
    code = ("import sys; sys.modules['halfmass._ckernels'] = None\n"
            "import halfmass\n"
            "assert halfmass.kernels.backend() == 'python'\n"
            "assert halfmass.kernels.available_backends() == ['python']\n"
            "print(halfmass.conformal_p_value([[0], [10]], [20]))")
    proc = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert proc.stdout.strip() == "2/3"


@needs_compiled
def test_benchmark_runs(capsys):
    import importlib.util
    import pathlib

    path = pathlib.Path(__file__).resolve().parents[1] / "benchmarks" / "bench_kernels.py"
    spec = importlib.util.spec_from_file_location("bench_kernels", path)
    bench = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(bench)
    bench.main(["--repeat", "1", "--quick"])
    out = capsys.readouterr().out
    assert "NO" not in out and out.count("yes") == 5
