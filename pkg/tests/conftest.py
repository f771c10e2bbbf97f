import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from freethrow.physics import CourtGeometry  # noqa: E402

GIANNIS = (18.4, 9.6)
CURRY = (18.5, 8.4)


@pytest.fixture
def geom():
    return CourtGeometry()


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def record_criterion():
    """Log one PASS/FAIL line for an acceptance criterion, then assert it."""

    def _record(number, name, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {name} ({detail})"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
