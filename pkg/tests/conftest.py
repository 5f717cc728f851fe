from __future__ import annotations

from fractions import Fraction

import pytest

from naklab.fock import CentralSign, FockVector, nakajima_basis
from naklab.models import blowup, k0, p1xp1, p2

HILBERT = CentralSign.HILBERT
ORBIFOLD = CentralSign.ORBIFOLD

# filled by tests/test_acceptance.py, printed at the end of the run
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def P2():
    return p2()


@pytest.fixture(scope="session")
def P1P1():
    return p1xp1()


@pytest.fixture(scope="session")
def F1():
    return blowup(1)


@pytest.fixture(scope="session")
def K0():
    return k0()


def basis_states(alg, level):
    return [FockVector(alg, {m: Fraction(1)}) for m in nakajima_basis(alg, level)]


def states_upto(alg, level):
    out = []
    for lv in range(level + 1):
        out.extend(basis_states(alg, lv))
    return out


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[0][2:])):
            terminalreporter.write_line(line)
