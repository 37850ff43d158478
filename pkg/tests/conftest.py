import numpy as np
import pytest

from lrdtest.simulate import RegressionSample, SimulationSpec, simulate_model

# one human-readable verdict line per acceptance criterion, printed at the
# end of the run so capture does not hide them
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def small_sample(rng):
    """n=60 sample with one covariate, used by the fixture oracles."""
    n = 60
    t = np.arange(1, n + 1) / n
    x = rng.standard_normal(n)
    y = 1.5 + 0.8 * x + rng.standard_normal(n)
    return RegressionSample(y=y, X=np.column_stack([np.ones(n), x]), t=t)


@pytest.fixture
def m1_sample():
    return simulate_model(SimulationSpec(n=500, model="M1", d=0.0, seed=7))
