"""Shared machines and fields."""

import pytest

from hahnauto import dfao as dfa
from hahnauto import gps
from hahnauto.field import FieldConfig

F2 = FieldConfig(2, 1)
F3 = FieldConfig(3, 1)
F4 = FieldConfig(2, 2)


def powers_of_two(field=F2):
    """LSD machine: output 1 exactly on the digits of powers of 2."""
    return dfa.Dfao(field, 2, False, dfa.LSD_INTEGER, 0, (0, 1, 0),
                    ((0, 1), (1, 2), (2, 2)))


def all_ones(field=F2, base=2, semantics=dfa.LSD_INTEGER):
    return dfa.constant(field, base, 1, semantics)


def descending_machine(field=F2):
    """Radix machine for sum_k t^(1/2 + 2^(-k-2)): strings .1 0^k 1."""
    # 0 start, 1 after '.', 2 after '.1', 3 after '.10*1' (nonzero), 4 dead
    D = 4
    trans = (
        (D, D, 1),
        (D, 2, D),
        (2, 3, D),
        (D, D, D),
        (D, D, D),
    )
    A = dfa.Dfao(field, 2, True, dfa.MSD_RADIX, 0, (0, 0, 0, 1, 0), trans)
    return gps.GpsAutomaton.from_dfao(A)


@pytest.fixture
def f2():
    return F2


@pytest.fixture
def f3():
    return F3


@pytest.fixture
def f4():
    return F4


@pytest.fixture
def z2():
    return gps.staircase_machine(F2, 2)


@pytest.fixture
def z3():
    return gps.staircase_machine(F3, 3)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for status, label in mod.RESULTS:
        terminalreporter.write_line(f"{status}  {label}")
