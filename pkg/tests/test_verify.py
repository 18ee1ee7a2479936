import pytest

from wavespec import verify
from wavespec.exceptions import ModelError


@pytest.fixture
def ctx(orbit):
    return verify.VerificationContext(orbit=orbit)


def test_cheap_suites_pass(ctx):
    results = verify.run_suites(ctx, ["model", "wave", "espec", "full_lin"],
                                include_expensive=False)
    failed = [(r.name, r.detail) for r in results if not r.passed]
    assert failed == []
    assert all(":" in r.name for r in results)


@pytest.mark.slow
def test_expensive_checks_skipped(ctx):
    results = verify.run_suites(ctx, ["slow_evans"], include_expensive=False)
    names = {r.name for r in results}
    assert "slow_evans: E(0) = 0" in names
    assert not any("real scan" in name for name in names)
    assert all(r.passed for r in results)


def test_unknown_suite(ctx):
    with pytest.raises(ValueError, match="unknown suites"):
        verify.run_suites(ctx, ["plots"])


def test_raising_check_counts_as_failure(ctx, monkeypatch):
    def check_broken(_ctx):
        raise ModelError("reduced flow evaluated at the fold")

    monkeypatch.setitem(verify.SUITES, "broken", [check_broken])
    [result] = verify.run_suites(ctx, ["broken"])
    assert not result.passed
    assert result.name == "check_broken"
    assert result.detail.startswith("ModelError")


@pytest.mark.slow
def test_full_verification(ctx):
    results = verify.run_suites(ctx)
    assert [r.name for r in results if not r.passed] == []


def test_hierarchy_check_reflects_eps_bar(ctx, monkeypatch):
    assert verify.check_hierarchy_on_contour(ctx).passed
    monkeypatch.setattr(verify.full_lin, "epsilon_bar", lambda *args, **kwargs: 0.0)
    assert not verify.check_hierarchy_on_contour(ctx).passed


def test_large_contour_in_expensive_subset():
    assert verify.check_large_contour_winding in verify.EXPENSIVE
    assert verify.check_large_contour_winding in verify.SUITES["slow_evans"]
