import numpy as np
import pytest

from warpdrift import (
    AnalyticOuLaw,
    Ensemble,
    analytic_ou_warp,
    bump_kernel,
    model_langevin,
    simulate_ensemble,
)
from warpdrift.warp import WarpFunction


class ClippedIdentity(WarpFunction):
    """x -> min(max(x, 0), 1); a fixed warp for hand computations."""

    kind = "clipped-identity"

    def eval(self, x):
        out = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
        return float(out) if np.ndim(x) == 0 else out


@pytest.fixture(scope="session")
def rho():
    return bump_kernel()


@pytest.fixture(scope="session")
def ou_warp():
    return analytic_ou_warp(AnalyticOuLaw(x0=2.0, T=5.0, t0=0.0, sigma=0.1))


@pytest.fixture(scope="session")
def model1_ensemble():
    """Model 1 at the reference design (N=100, n=50, T=5, x0=2), fixed seed."""
    return simulate_ensemble(model_langevin(), 2.0, 5.0, 50, 100, master_seed=7)


@pytest.fixture(scope="session")
def big_model1_ensemble():
    return simulate_ensemble(model_langevin(), 2.0, 5.0, 2000, 2000, master_seed=11)


@pytest.fixture
def constant_ensemble():
    return Ensemble(np.tile([[0.3], [0.7], [1.1]], (1, 11)), T=1.0, x0=0.3)


def pytest_terminal_summary(terminalreporter):
    from tests import acceptance_log

    if acceptance_log.LINES:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_log.LINES:
            terminalreporter.write_line(line)
