import numpy as np
import pytest

from pttrimmer.core import SystemParams

_ACCEPTANCE_LINES = []


@pytest.fixture
def sym_params():
    """Reference symmetric-phase parameters (omega = 5, gamma = 1, j = 5)."""
    return SystemParams(omega=5.0, gamma=1.0, j=5.0)


@pytest.fixture
def broken_params():
    """Reference broken-phase parameters (omega = 5, gamma = 1, j = 0.5)."""
    return SystemParams(omega=5.0, gamma=1.0, j=0.5)


@pytest.fixture
def rng():
    return np.random.default_rng(20161016)


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line for an acceptance criterion, then assert it."""

    def record(number, title, passed, detail=""):
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {number:>2}: {title}"
        if detail:
            line += f" ({detail})"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        assert passed, line

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
