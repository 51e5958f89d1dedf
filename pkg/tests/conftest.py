import numpy as np
import pytest

from gbsm_teleport.states import InfoState


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def plus():
    return InfoState(2 ** -0.5, 2 ** -0.5)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = next((m for name, m in sys.modules.items() if name.endswith("test_acceptance")), None)
    if mod is not None and getattr(mod, "RESULTS", None):
        terminalreporter.section("acceptance criteria")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)
