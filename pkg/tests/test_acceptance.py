"""Acceptance criteria 1-10 on the fast profile; one PASS/FAIL line per criterion
is printed in the terminal summary."""
import time

import pytest

from conftest import ACCEPTANCE
from fiohardy.verify import CRITERIA


@pytest.mark.acceptance
@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, fast_ctx, request):
    lines = request.config.stash[ACCEPTANCE]
    lines[number] = f"criterion {number} FAIL: raised before completing"
    t0 = time.perf_counter()
    res = CRITERIA[number](fast_ctx)
    res.seconds = time.perf_counter() - t0
    lines[number] = res.summary()
    failed = [c.describe() for c in res.checks if not c.passed]
    assert res.passed, "; ".join(failed)
