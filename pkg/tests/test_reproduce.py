import math

import pytest

from evals.reproduce import ClaimResult, Reproduction, score


@pytest.fixture(scope="module")
def quick():
    return Reproduction(scale=100, limit=300_000)


def test_zhang_claim(quick):
    result = quick.zhang()
    assert result.passed
    assert "at or above 20: []" in result.detail


def test_corollary_claim(quick):
    assert quick.corollary().passed


def test_appendix_root_claim(quick):
    result = quick.appendix_root()
    assert result.passed
    assert "N = 74" in result.detail


def test_audit_claims_report_the_rounding_finding(quick):
    results = {r.name: r.passed for r in quick.constants()}
    assert results["audit i"]
    assert not results["audit ii"]
    assert results["audit ii-b"]


def test_theorem1_beyond_table_is_reported_not_raised(quick):
    result = quick.theorem1("5/2", 1)
    assert not result.passed
    assert "beyond desk-scale scanning" in result.detail


def test_theorem1_claim(quick):
    assert quick.theorem1("2", 1, samples=10).passed


def test_score():
    results = [ClaimResult("a", True, ""), ClaimResult("b", False, "")]
    assert score(results) == 0.5
    assert math.isnan(score([]))
