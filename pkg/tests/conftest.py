from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent

# filled by tests/test_acceptance.py, printed at the end of the session
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def config_dir():
    return ROOT / "configs"


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
