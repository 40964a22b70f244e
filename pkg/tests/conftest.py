import numpy as np
import pytest

import jumpou as J

# verdict lines recorded by the acceptance tests; replayed after the run so
# they stay visible despite output capture
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def small_grid():
    return J.TimeGrid.daily(50)


@pytest.fixture
def one_jump_spec():
    return J.ModelSpec((J.ComponentSpec(sign=1),))


@pytest.fixture
def one_jump_params():
    return J.Params(
        mu=1.0,
        sigma2=0.01,
        rho0=float(np.exp(-1 / 8)),
        jumps=(
            J.JumpParams(
                rho=float(np.exp(-1 / 2)),
                beta=0.7,
                intensity=J.ConstantIntensity(0.1),
            ),
        ),
    )
