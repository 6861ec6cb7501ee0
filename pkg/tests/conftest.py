import pytest

from omegalab.machine import parse_tokens
from omegalab.omega import full_universe


@pytest.fixture(scope="session")
def universe4():
    """Every valid program of at most 4 tokens, classified by the exact oracle."""
    return full_universe(4)


@pytest.fixture
def inc_loop():
    return parse_tokens("INC LOOP_OPEN LOOP_CLOSE END")


@pytest.fixture
def dec_loop():
    return parse_tokens("DEC LOOP_OPEN LOOP_CLOSE END")


_criteria: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::" not in report.nodeid:
        return
    if report.when == "call" or report.outcome != "passed":
        name = report.nodeid.split("::")[-1]
        if _criteria.get(name) != "FAIL":
            _criteria[name] = "PASS" if report.passed else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_criteria, key=lambda n: int(n.split("_")[1][2:])):
        terminalreporter.write_line(f"{_criteria[name]}  {name}")
