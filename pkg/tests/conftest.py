import numpy as np
import pytest

from polycorr.correlator import CorrelatorSpec, TimeGrid
from polycorr.generator import PolyModel

# OU parameters used throughout the accuracy table
REF_OU = PolyModel(b0=0.75, b1=-5.0, sigma0=0.01)
REF_Y = 0.15


def table_grid(m):
    return TimeGrid(0.0, [1.0 + 0.5 * j for j in range(m + 1)])


def monomial_polys(powers):
    """Coefficient rows so that ``Y(s_j)**powers[j]`` sits at time ``s_j``."""
    m = len(powers) - 1
    n = max(max(powers), 1)
    polys = np.zeros((m + 1, n + 1))
    for j, e in enumerate(powers):
        polys[m - j, e] = 1.0
    return polys


def random_diffusion(rng):
    """Drift and squared diffusion with coefficients in the unit box, ``a(x) >= 0`` for all x."""
    s0, s2 = rng.uniform(0.0, 1.0, 2)
    s1 = rng.uniform(-1.0, 1.0) * 2.0 * np.sqrt(s0 * s2)
    return PolyModel(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), s0, s1, s2)


def random_spec(rng, m_max=3, n_max=3, min_step=0.1):
    m = int(rng.integers(0, m_max + 1))
    n = int(rng.integers(1, n_max + 1))
    s = rng.uniform(0.0, 0.5) + np.cumsum(rng.uniform(min_step, 1.0, m + 1))
    return CorrelatorSpec(random_diffusion(rng), rng.normal(size=(m + 1, n + 1)),
                          TimeGrid(0.0, s), rng.uniform(-1.0, 1.0))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(mod.RESULTS, key=lambda l: int(l.split()[1].rstrip(":"))):
        terminalreporter.write_line(line)
