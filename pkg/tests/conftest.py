"""Collects one verdict line per acceptance criterion and prints them at the end of the run."""

import pytest

_VERDICTS: dict[int, str] = {}


@pytest.fixture
def verdict():
    def record(number: int, passed: bool, detail: str) -> None:
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {number:>2}: {detail}"
        _VERDICTS[number] = line
        print(line)
    return record


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_VERDICTS):
        terminalreporter.write_line(_VERDICTS[number])
