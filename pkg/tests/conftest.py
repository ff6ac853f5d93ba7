import pytest

from pingcycle.kinematics import Scenario

EX_A = Scenario(U=9, V=20, S=4, r=4.5, R=8)
EX_B = Scenario(U=9, V=20, S=4, r=3.5, R=8)
EX_C = Scenario(U=9, V=8, S=4, r=3.5, R=8)
ZERO = Scenario(U=10, V=8, S=3, r=4, R=8)

# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES = {}


@pytest.fixture
def ex_a():
    return EX_A


@pytest.fixture
def ex_b():
    return EX_B


@pytest.fixture
def ex_c():
    return EX_C


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES, key=lambda k: (int(k.split("/")[0]), k)):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
