import itertools

import pytest

ACCEPTANCE_LINES = []

# R x gamma/kappa x delta/gamma used for oracle equivalence and invariants
ACCEPTANCE_GRID = list(itertools.product((0.01, 0.1, 1.0, 10.0, 100.0), (0.05, 1.0, 10.0), (0.0, 0.5, 2.0)))


@pytest.fixture
def report():
    """Record one PASS/FAIL line per acceptance criterion check."""
    def _report(name, ok, detail=""):
        ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}".rstrip())
        return ok
    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
