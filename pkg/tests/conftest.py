import numpy as np
import pytest

from fomlab import casimir, electrostatics as es
from fomlab.simulator import ProbeParams

#: one line per acceptance criterion, echoed after the test summary
ACCEPTANCE_VERDICTS = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_VERDICTS):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def probe():
    return ProbeParams()


@pytest.fixture(scope="session")
def cap(probe):
    return es.build_interpolator(probe.R)


@pytest.fixture(scope="session")
def cpp_model(probe):
    return es.build_cpp_interpolator(probe.R)


@pytest.fixture(scope="session")
def gold_gradient(probe):
    grid = np.geomspace(30e-9, 5e-6, 80)
    return casimir.gradient_curve(casimir.gold_air_stack(), probe.R, grid)
