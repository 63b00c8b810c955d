"""The ten acceptance criteria, one test each; every run prints its PASS/FAIL line."""
import sys

import pytest

from phigamma.robba import PrecisionProfile
from phigamma.selftest import CRITERIA, run_criterion

RESULTS = []


@pytest.mark.parametrize("number", [num for num, _, _ in CRITERIA],
                         ids=[f"{num:02d}-{name.replace(' ', '-')}" for num, name, _ in CRITERIA])
def test_criterion(number):
    outcome = run_criterion(number, PrecisionProfile())
    RESULTS.append(outcome)
    print(outcome.line())
    assert outcome.passed, outcome.detail


if __name__ == "__main__":
    outcomes = [run_criterion(num) for num, _, _ in CRITERIA]
    for o in outcomes:
        print(o.line())
    sys.exit(0 if all(o.passed for o in outcomes) else 1)
