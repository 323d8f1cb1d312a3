import numpy as np
import pytest

from vdclab.growth import make_function


@pytest.fixture(scope="session")
def f11():
    return make_function("pure", 1.1)


@pytest.fixture
def rng():
    return np.random.default_rng(2024)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None:
        return
    done = {int(s.split("]")[1].split(".")[0]): s for s in mod.LINES}
    terminalreporter.section("acceptance criteria")
    for k in range(1, 13):
        terminalreporter.write_line(done.get(k, f"[FAIL] {k:>2}. did not complete (error or not run)"))
