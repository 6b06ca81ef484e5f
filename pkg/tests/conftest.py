import numpy as np
import pytest

from halfmass import kernels

ACCEPTANCE_LINES = []


def record(label, ok, detail=""):
    """Print and keep one pass/fail line for the session summary."""
    line = f"{'PASS' if ok else 'FAIL'}  {label}" + (f"  ({detail})" if detail else "")
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(params=kernels.available_backends())
def each_backend(request):
    previous = kernels.use_backend(request.param)
    yield request.param
    kernels.use_backend(previous)
