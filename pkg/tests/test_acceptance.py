"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Every check is exact unless a tolerance is stated, and each carries its wall-clock
budget; a result counts as passing only if it is correct *and* within budget.
"""

from __future__ import annotations

import os

import pytest
from sympy import divisor_sigma

from hecke_exponents.checks import CHECKS
from hecke_exponents.modforms import e2_series

WORKERS = min(4, os.cpu_count() or 1)


def _report(capsys, res):
    with capsys.disabled():
        print("\n" + res.line())
    assert res.passed, res.detail
    assert res.within_time, f"{res.seconds:.2f}s exceeds the {res.limit}s budget"


def test_e2_sympy_cross_check():
    E2 = e2_series(1001)
    assert all(E2.coeff(n) == -24 * int(divisor_sigma(n)) for n in range(1, 1001))


@pytest.mark.parametrize("number", [n for n in CHECKS if n != 11])
def test_criterion(number, capsys):
    _report(capsys, CHECKS[number]())


def test_criterion_11_equidistribution(capsys):
    _report(capsys, CHECKS[11](workers=WORKERS))
