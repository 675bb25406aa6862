import sys

import numpy as np
import pytest

from hkprop import builtin


def random_cone(rng, d, scale=1.0):
    """Random complex symmetric matrix with positive definite real part."""
    A = rng.standard_normal((d, d))
    B = rng.standard_normal((d, d))
    re = A @ A.T + 0.1 * np.eye(d)
    im = scale * (B + B.T)
    return re + 1j * im


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(params=["free", "harmonic", "torsional", "gaussian_well"])
def any_model(request):
    return builtin(request.param)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(mod.RESULTS, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
        terminalreporter.write_line(line)
