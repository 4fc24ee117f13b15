import numpy as np
import pytest

from screwmin.params import ScrewParams

GRID = [0.5, 1.0, 2.0]
PARAM_GRID = [ScrewParams(g, w) for g in GRID for w in GRID]


@pytest.fixture
def unit():
    return ScrewParams(1.0, 1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    # one PASS/FAIL line per acceptance criterion, in order
    import sys

    mod = next((m for n, m in sys.modules.items() if n.endswith("test_acceptance")), None)
    rows = [mod.RESULTS[k] for k in sorted(mod.RESULTS, key=lambda t: int(t[2:]))] if mod else []
    if rows:
        terminalreporter.section("acceptance criteria")
        for row in rows:
            terminalreporter.write_line(row)
