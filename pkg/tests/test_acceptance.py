"""Acceptance suite: one printed PASS/FAIL line per criterion.

Tolerances live in ``ccmodel.acceptance``; they are re-pinned here so that a
change there shows up as a test failure instead of a silent relaxation.
"""

import pytest

from ccmodel import acceptance


def test_tolerances_are_pinned():
    assert acceptance.TABLE1_TOLERANCE == 0.08
    assert acceptance.TABLE1_TIME_LIMIT == 2.0
    assert acceptance.ASYMPTOTE_G == 1e6
    assert acceptance.ASYMPTOTE_TOLERANCE == 1e-3
    assert (acceptance.CRITICAL_VALUE, acceptance.CRITICAL_TOLERANCE) == (3.77921, 1e-5)
    assert acceptance.CRITICAL_QUOTED == 3.75
    assert acceptance.IDENTITY_TOLERANCE == 1e-6
    assert acceptance.IDENTITY_G == (1.5, 2.0, 3.0, 5.0, 8.0, 10.0)
    assert acceptance.ORACLE_TIME_LIMIT == 30.0


@pytest.mark.parametrize("number", sorted(acceptance.CRITERIA))
def test_criterion(number, capsys):
    result = acceptance.run_criterion(number)
    with capsys.disabled():
        print("\n" + result.line())
    assert result.passed, result.detail
