import pytest

from hatters.game import SearchBudget

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def quick_budget():
    return SearchBudget(node_limit=10**7, time_limit=20)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
