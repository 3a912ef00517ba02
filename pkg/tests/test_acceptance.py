"""The twelve acceptance criteria, one test each, at exact tolerance.

A pass/fail line per criterion is printed at the end of the session (and by
``python3 tests/test_acceptance.py``).
"""

import pytest

from sheafmorse.acceptance import CHECKS

RESULTS = {}


@pytest.mark.parametrize("number", range(1, len(CHECKS) + 1))
def test_criterion(number):
    result = CHECKS[number - 1]()
    RESULTS[number] = result
    print(result.line())
    assert result.ok, result.detail


if __name__ == "__main__":
    for check in CHECKS:
        print(check().line())
