import pytest

_CRITERIA = {}


@pytest.fixture
def report():
    """Record one pass/fail line for an acceptance criterion and print it."""
    def record(number: int, ok: bool, text: str):
        line = f"criterion {number:2} {'pass' if ok else 'FAIL'}: {text}"
        _CRITERIA[number] = line
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in range(1, 13):
        terminalreporter.write_line(_CRITERIA.get(n, f"criterion {n:2} FAIL: not reached (raised or deselected)"))
