import pytest

from syndromeid import codes

# stabilizer group of the 5-qubit code, one string per column of the published table
FIVE_QUBIT_TABLE_ROWS = [
    "IXIXZXIYIYZYZZXY",
    "IZXIXYZYYZYIZIXX",
    "IZZXIIYZXIYYXZYX",
    "IXZZXYYIXZZXIYIY",
    "IIXZZXZZYYIXXYYI",
]
FIVE_QUBIT_GROUP = sorted("".join(row[k] for row in FIVE_QUBIT_TABLE_ROWS) for k in range(16))

# first five rows of D, columns X_1..X_5, Z_1..Z_5, Y_1..Y_5
FIVE_QUBIT_D_HEAD = [
    "100100110000000",
    "010010011000000",
    "101000001100000",
    "010101000100000",
    "110110101001010",
]


@pytest.fixture(scope="session")
def five():
    return codes.five_qubit()


@pytest.fixture(scope="session")
def toric3():
    return codes.toric(3)


_ACCEPTANCE_LINES: list[str] = []


def record_acceptance(line: str) -> None:
    _ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
