"""Shared graphs.

The three-vertex graphs below carry the labels used in the worked catalog,
with vertices ordered ``v1, v2, v3``.
"""

import pytest

from lpaclass import builtin, enumerate_pis_sing, from_incidence


def named(rows):
    return from_incidence(rows)


E17_1 = named([[0, 1, 1], [0, 1, 1], [0, 1, 1]])
E16_1 = named([[0, 1, 1], [0, 0, 1], [0, 1, 1]])
E6_1 = named([[1, 1, 0], [0, 0, 1], [1, 1, 1]])
E1_6 = named([[0, 1, 1], [1, 0, 1], [1, 1, 0]])
E1_7 = named([[0, 1, 1], [1, 1, 0], [1, 0, 1]])
E2_7 = named([[1, 1, 1], [1, 1, 0], [1, 0, 1]])
R2_SQ = builtin("R_n_k", n=2, k=2)


def catalog():
    """The two- and three-vertex catalog: 2 + 1 + 34 graphs."""
    return enumerate_pis_sing(2) + [builtin("B_n_k", n=2, k=2)] + enumerate_pis_sing(3)


@pytest.fixture(scope="session")
def three_vertex():
    return enumerate_pis_sing(3)


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    """Record one acceptance line; printed immediately and again in the summary."""

    def record(number, ok, detail):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
