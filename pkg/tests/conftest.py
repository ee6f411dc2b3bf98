import pytest

_ACCEPTANCE = []


@pytest.fixture
def acceptance():
    """Record one acceptance-criterion outcome; printed in the session summary."""

    def record(number, passed, detail):
        _ACCEPTANCE.append((number, passed, detail))
        print(f"criterion {number}: {'PASS' if passed else 'FAIL'} {detail}")
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, passed, detail in sorted(_ACCEPTANCE, key=lambda item: item[0]):
        terminalreporter.write_line(f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}")
