import logging

import pytest

from xrcache.config import _env_float, _env_int


def test_unset_variables_keep_the_default(monkeypatch):
    monkeypatch.delenv("XRCACHE_TEST_KNOB", raising=False)
    assert _env_int("XRCACHE_TEST_KNOB", 7) == 7
    assert _env_float("XRCACHE_TEST_KNOB", 0.5) == 0.5


def test_valid_values_are_parsed(monkeypatch):
    monkeypatch.setenv("XRCACHE_TEST_KNOB", "12")
    assert _env_int("XRCACHE_TEST_KNOB", 1) == 12
    assert _env_float("XRCACHE_TEST_KNOB", 1.0) == 12.0


@pytest.mark.parametrize("raw, reason", [("many", "not a valid"), ("0", "is below")])
def test_bad_values_fall_back_with_a_warning(monkeypatch, caplog, raw, reason):
    monkeypatch.setenv("XRCACHE_TEST_KNOB", raw)
    with caplog.at_level(logging.WARNING, logger="xrcache.config"):
        assert _env_int("XRCACHE_TEST_KNOB", 3, min_value=1) == 3
    assert reason in caplog.text
    assert "XRCACHE_TEST_KNOB" in caplog.text
