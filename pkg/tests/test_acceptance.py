"""One test per acceptance criterion; each prints a PASS/FAIL line."""

import pytest

from symred import cli

CFG = cli.RunConfig()


@pytest.mark.parametrize("suite", cli.SUITES, ids=[s.__name__ for s in cli.SUITES])
def test_criterion(suite, record_criterion):
    crit = suite(CFG)
    record_criterion(crit)
    print(crit.line())
    assert crit.passed, crit.detail
