"""The fifteen end-to-end acceptance criteria at their full bounds.

Each case prints a single [PASS]/[FAIL] line, visible even under capture.
"""

import time

import pytest

from sc6verify.acceptance import CRITERIA


@pytest.mark.slow
@pytest.mark.parametrize("criterion", CRITERIA, ids=[c.__name__.removeprefix("crit_") for c in CRITERIA])
def test_criterion(criterion, capsys):
    t0 = time.perf_counter()
    report = criterion("full")
    with capsys.disabled():
        print(f"\n{report.summary()}  ({time.perf_counter() - t0:.1f}s)")
    assert report.passed, report.failures
