import functools

import pytest

from biref import NONSQUARE, SQUARE, BilinearSpace, field_make
from biref.oracle import closure

MATRIX = [(q, n, d) for q in (3, 5) for n in (2, 3, 4) for d in (SQUARE, NONSQUARE)] + [
    (3, 5, SQUARE),
    (3, 5, NONSQUARE),
]


@functools.lru_cache(maxsize=None)
def cell_table(q, n, disc):
    """Full O(V) for the standard space diag(1, ..., 1, disc), cached per session."""
    return closure(BilinearSpace.standard(field_make(q), n, disc))


@pytest.fixture(scope="session")
def F3():
    return field_make(3)


@pytest.fixture(scope="session")
def F5():
    return field_make(5)


_ACCEPTANCE_LINES = []


@pytest.fixture
def report_line():
    def emit(line):
        print(line)
        _ACCEPTANCE_LINES.append(line)

    return emit


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
