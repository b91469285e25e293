import sys

import numpy as np
import pytest


def unit(rng, d):
    z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return z / np.linalg.norm(z)


@pytest.fixture
def rng():
    return np.random.default_rng(20140821)


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    if acceptance is None or not acceptance.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in range(1, acceptance.CRITERIA + 1):
        terminalreporter.write_line(acceptance.RESULTS.get(n, f"criterion {n:2d} FAIL  raised before reaching a verdict"))
