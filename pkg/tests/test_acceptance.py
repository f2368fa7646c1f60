"""Nine acceptance checks, all exact.  Run with ``-s`` to see the summary lines."""

import pytest

from conred.selftest import CRITERIA


@pytest.mark.parametrize("criterion", CRITERIA, ids=[c.__name__.removeprefix("criterion_") for c in CRITERIA])
def test_criterion(criterion):
    name, passed, detail = criterion()
    print(f"{'PASS' if passed else 'FAIL'} {name}: {detail}")
    assert passed, detail
