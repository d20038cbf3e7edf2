import pytest

_LINES = []


@pytest.fixture(scope="session")
def acceptance():
    """Record one ``PASS``/``FAIL`` line per acceptance criterion."""

    def record(criterion, passed, detail):
        _LINES.append(f"{'PASS' if passed else 'FAIL'}  {criterion}: {detail}")
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in _LINES:
            terminalreporter.write_line(line)
