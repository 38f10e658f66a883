import numpy as np
import pytest

from fraclap.domain import Domain, build_grid, default_basis


@pytest.fixture(scope="session")
def interval_pi():
    dom = Domain.interval(0.0, np.pi)
    grid = build_grid(dom, 256)
    return dom, grid, default_basis(grid)


@pytest.fixture(scope="session")
def sym_interval():
    dom = Domain.interval(-1.0, 1.0)
    grid = build_grid(dom, 512)
    return dom, grid, default_basis(grid)


ACCEPTANCE_LINES: dict = {}


@pytest.fixture
def record():
    """Record one pass/fail line per acceptance criterion for the terminal summary."""
    def _record(number: int, ok: bool, detail: str):
        line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES[number] = line
        print(line)
        return ok
    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
