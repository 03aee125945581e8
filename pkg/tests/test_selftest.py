import pytest

from minrank_pke import selftest
from minrank_pke.rng import Rng


def test_fast_level_passes():
    results = selftest.run("fast", Rng(2024))
    assert len(results) == len(selftest.CHECKS)
    failed = [r for r in results if not r.passed]
    assert not failed, failed


def test_crash_is_failure(monkeypatch):
    def boom(rng, scale):
        raise RuntimeError("boom")

    monkeypatch.setattr(selftest, "CHECKS", [("boom", boom)])
    (res,) = selftest.run("fast", Rng(1))
    assert not res.passed and "boom" in res.detail


def test_unknown_level():
    with pytest.raises(ValueError):
        selftest.run("medium")
