import json
from pathlib import Path

import pytest

from seqroute import parse_tau

EX16_TAU = (7, 14, 11, 6, 12, 10, 1, 8, 16, 5, 4, 3, 9, 15, 13, 2)
EX16_TAU_TEXT = ",".join(map(str, EX16_TAU))
DATA = Path(__file__).parent / "data"

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def ex16():
    return parse_tau(EX16_TAU_TEXT)


@pytest.fixture
def ex16_golden():
    return json.loads((DATA / "example16_graph.json").read_text())


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
