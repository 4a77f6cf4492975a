import numpy as np
import pytest

from auvplan.current import CurrentField
from auvplan.graph import OperationGraph

# one line per acceptance test, printed at the end of the run
_ACCEPTANCE = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        name = report.nodeid.split("::")[-1]
        _ACCEPTANCE.append((name, report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _ACCEPTANCE:
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{verdict}  {name}")


def detour_world():
    """Five-node graph whose edge (1, 2) crosses a strong local current patch.

    Routes from 0 to 3: 0-1-3, 0-1-2-3 and 0-1-2-4-3. The patch pushes along
    the heading of (1, 2) hard enough that the straight path breaks the surge
    limit, so the optimized path detours and runs late. Every other edge sees
    still water.
    """
    pos = [(1000, 5000, 50), (3000, 5000, 50), (5000, 6000, 50), (7000, 5000, 50), (6000, 8000, 50)]
    g = OperationGraph.from_positions(pos, [(0, 1), (1, 2), (2, 3), (1, 3), (2, 4), (4, 3)],
                                      bounds=(10000.0, 10000.0, 100.0))
    zero = CurrentField.zeros()
    xs, ys = zero.cell_centres()
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    patch = (np.abs(X - 4000) < 250) & (np.abs(Y - 5500) < 250)
    f = CurrentField(np.where(patch, 0.9, 0.0), np.where(patch, 0.45, 0.0), (10000.0, 10000.0))
    # budget: the 3-edge route plus 300 s of slack; 0-1-2-4-3 does not fit
    budget = sum(g.edge(*k).expected_time for k in [(0, 1), (1, 2), (2, 3)]) + 300.0
    return g, f, budget


@pytest.fixture(scope="session")
def detour():
    return detour_world()
