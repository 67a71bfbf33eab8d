import pytest

# one line per acceptance criterion, printed after the run
CRITERIA_LINES: list = []


@pytest.fixture
def record_criterion():
    def _record(number, name, ok, detail=""):
        CRITERIA_LINES.append((number, f"criterion {number:2d} {name:34s} "
                                       f"{'PASS' if ok else 'FAIL'}  {detail}"))
    return _record


def pytest_terminal_summary(terminalreporter):
    if CRITERIA_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(CRITERIA_LINES):
            terminalreporter.write_line(line)
