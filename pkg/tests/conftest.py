"""Collect acceptance outcomes and print one line per criterion at the end of the run."""

import re

import pytest

_OUTCOMES: dict[str, str] = {}
_DETAILS: dict[str, str] = {}
_CRITERION = re.compile(r"test_criterion_(\d+)_(\w+)")


@pytest.fixture
def measured(request):
    """Attach a short measurement summary to the running acceptance test."""

    def record(text: str) -> None:
        _DETAILS[request.node.nodeid] = text

    return record


def pytest_runtest_logreport(report):
    if not _CRITERION.search(report.nodeid):
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _OUTCOMES[report.nodeid] = "PASS" if report.outcome == "passed" else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid in sorted(_OUTCOMES, key=lambda n: int(_CRITERION.search(n).group(1))):
        num, name = _CRITERION.search(nodeid).groups()
        line = f"{_OUTCOMES[nodeid]}  criterion {int(num):2d}  {name.replace('_', ' ')}"
        if nodeid in _DETAILS:
            line += f"  [{_DETAILS[nodeid]}]"
        terminalreporter.write_line(line)
