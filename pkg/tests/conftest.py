import pytest

ACCEPTANCE: dict = {}


@pytest.fixture
def record():
    """Store a one-line acceptance verdict, printed in the terminal summary."""

    def _record(number, ok, detail):
        ACCEPTANCE[number] = (ok, detail)
        return ok

    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")
