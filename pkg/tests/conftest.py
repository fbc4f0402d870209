"""Collects one verdict line per acceptance criterion and prints them at the
end of the run."""

import pytest

_VERDICTS = []


class Verdicts:
    def record(self, name, passed, detail=""):
        _VERDICTS.append((name, bool(passed), detail))
        return bool(passed)


@pytest.fixture(scope="session")
def verdicts():
    return Verdicts()


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in _VERDICTS:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}: {detail}")
