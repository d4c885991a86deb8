import pytest

from camw.domain import Movement, Vehicle


def veh(direction: str, comm: bool = False, slot: int = 0) -> Vehicle:
    return Vehicle(Movement.STRAIGHT if direction == "S" else Movement.LEFT, comm, slot)


@pytest.fixture
def S():
    return lambda comm=False: veh("S", comm)


@pytest.fixture
def L():
    return lambda comm=False: veh("L", comm)


VERDICTS: list = []


@pytest.fixture
def report():
    """Print a criterion verdict now and repeat it in the terminal summary."""

    def emit(line: str) -> None:
        VERDICTS.append(line)
        print(line)

    return emit


def pytest_terminal_summary(terminalreporter):
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in VERDICTS:
            terminalreporter.write_line(line)
