import pytest

from xrcache.services.examples import CHECKS, reproduce_examples, run_check


@pytest.mark.parametrize("name,check", CHECKS, ids=[name for name, _ in CHECKS])
def test_worked_example(name, check):
    result = run_check(name, check)
    assert result.passed, result.detail


def test_failed_check_is_reported():
    def broken():
        raise AssertionError("expected 1, got 2")

    result = run_check("broken", broken)
    assert not result.passed
    assert result.detail == "expected 1, got 2"


def test_all_checks_run():
    assert [r.name for r in reproduce_examples()] == [name for name, _ in CHECKS]
