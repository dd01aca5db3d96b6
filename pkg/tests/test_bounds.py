import math
from dataclasses import dataclass
from fractions import Fraction

import pytest

from PrimeBound.base.exact_compare import ExactConstant
from PrimeBound.bounds.audit import audit_constants, audit_limit
from PrimeBound.bounds.threshold import (
    ThresholdFunction,
    eval_f_appendix,
    eval_fk,
    find_root,
)
from PrimeBound.errors import BracketError, ContractViolation, DomainError
from PrimeBound.verify.scan import sample_points

from .helpers import CLOSE_IN_VALUE

TWO = ExactConstant.rational(2)


def test_appendix_changes_sign_between_74_and_75():
    assert eval_f_appendix(74) < 0 < eval_f_appendix(75)
    assert eval_f_appendix(74) == CLOSE_IN_VALUE(-0.000378, 1e-5)


def test_appendix_enclosure_brackets_midpoint():
    enclosure = eval_f_appendix(100, enclosure=True)
    assert enclosure.lower <= eval_f_appendix(100) <= enclosure.upper
    assert enclosure.width < 1e-15


def test_appendix_approaches_one_minus_log_two():
    value = eval_f_appendix(10**9)
    assert 0.2 < value < 1 - math.log(2)
    assert eval_f_appendix(10**12) > value


def test_appendix_domain():
    with pytest.raises(DomainError):
        eval_f_appendix(1.5)


def test_appendix_root():
    result = find_root(ThresholdFunction.appendix(), tolerance=1e-9)
    lo, hi = result.bracket
    assert Fraction("74.38") <= lo < hi <= Fraction("74.40")
    assert result.analytic_threshold == 74
    assert result.floor_certain
    assert not result.monotonicity_violated
    assert ThresholdFunction.appendix().sign(lo)[0] == -1
    assert ThresholdFunction.appendix().sign(hi)[0] == 1


def test_fk_matches_closed_form_in_floats():
    x, k = 1000, 1
    expected = (
        1
        - (math.log(2) / math.log(x)) * (1 + k / x) * math.log((x + k) * math.log(x + k))
        - 1.25506 / math.log(x)
    )
    assert eval_fk(x, TWO, k) == CLOSE_IN_VALUE(expected, 1e-12)


@pytest.mark.parametrize("x, k", [(1, 0), (0.5, 3), (10, -1)])
def test_fk_domain(x, k):
    with pytest.raises(DomainError):
        eval_fk(x, TWO, k)


def test_fk_rejects_infinite_argument():
    with pytest.raises(DomainError):
        eval_fk(float("inf"), TWO, 0)


def test_fk_root_c2_k1():
    result = find_root(ThresholdFunction.fk(TWO, 1))
    assert 8000 < result.root_float < 9500
    assert result.analytic_threshold == math.floor(result.root)
    assert result.floor_certain
    assert not result.monotonicity_violated
    assert result.width <= 1e-9
    # f_k is positive just past the root and negative at the threshold itself.
    fn = ThresholdFunction.fk(TWO, 1)
    assert fn.sign(Fraction(result.analytic_threshold + 1))[0] == 1
    assert fn.sign(Fraction(result.analytic_threshold))[0] == -1


def test_fk_root_c_three_halves():
    result = find_root(ThresholdFunction.fk(ExactConstant.rational(Fraction(3, 2)), 1))
    assert 15 < result.root_float < 30


def test_fk_roots_increase_with_k():
    roots = [find_root(ThresholdFunction.fk(TWO, k)).root for k in range(11)]
    assert all(a < b for a, b in zip(roots, roots[1:]))


def test_fk_rejects_c_outside_range():
    with pytest.raises(DomainError):
        ThresholdFunction.fk(ExactConstant.rational(3), 1)


def test_bracket_cap():
    with pytest.raises(BracketError):
        find_root(ThresholdFunction.fk(TWO, 1), hi_cap_bits=10)


def test_contract_violation_when_positive_at_two():
    # log c < 0 flips the sign of the middle term.
    fn = ThresholdFunction.fk(ExactConstant.rational(Fraction(1, 10)), 0, certify=False)
    with pytest.raises(ContractViolation):
        find_root(fn)


def test_root_enclosure_constant():
    c = ExactConstant.enclosure("sqrt(2)")
    result = find_root(ThresholdFunction.fk(c, 0))
    assert result.floor_certain
    assert result.root_float > 2


class TestAuditConstants:
    @pytest.fixture(scope="class")
    def report(self):
        return audit_constants()

    def test_rosser_constant_matches_113(self, report):
        finding = report.finding("i")
        assert finding.passed
        assert abs(finding.deviation) < 5e-6

    def test_appendix_constant_is_rounded_beyond_tolerance(self, report):
        # 1.25506 * (1 + 1/e) = 1.716771..., about 9.2e-6 below 1.71678.
        finding = report.finding("ii")
        assert not finding.passed
        assert finding.deviation == CLOSE_IN_VALUE(-9.2e-6, 1e-6)

    def test_appendix_constant_is_an_upper_bound(self, report):
        assert report.finding("ii-b").passed

    def test_log_ratio_never_exceeds_bound(self, report):
        finding = report.finding("iii")
        assert finding.passed
        assert finding.extra["exceeding_points"] == 0
        assert finding.extra["slope_violations"] == 0
        assert finding.value == CLOSE_IN_VALUE(1 + 1 / math.e, 1e-6)

    def test_maximum_sits_at_e_to_the_e(self, report):
        finding = report.finding("iii-argmax")
        assert finding.passed
        assert finding.reference == CLOSE_IN_VALUE(15.154262, 1e-5)

    def test_report_does_not_pass_overall(self, report):
        assert not report.passed


class TestAuditLimit:
    @pytest.fixture(scope="class")
    def report(self):
        return audit_limit(TWO)

    @pytest.mark.parametrize("k", [0, 1, 5, 10])
    def test_still_far_at_ten_to_twelve(self, report, k):
        finding = report.finding(f"limit-k{k}-1e12")
        assert not finding.passed
        assert finding.deviation == CLOSE_IN_VALUE(-0.129, 0.01)

    @pytest.mark.parametrize("k", [0, 1, 5, 10])
    def test_within_tolerance_at_ten_to_four_hundred(self, report, k):
        finding = report.finding(f"limit-k{k}-1e400")
        assert finding.passed
        assert finding.reference == CLOSE_IN_VALUE(1 - math.log(2), 1e-12)

    def test_gap_is_independent_of_k(self, report):
        deviations = [report.finding(f"limit-k{k}-1e400").deviation for k in (0, 1, 5, 10)]
        assert max(deviations) - min(deviations) < 1e-12


def test_coarse_tolerance_still_certifies_the_floor():
    result = find_root(ThresholdFunction.appendix(), tolerance=10)
    lo, hi = result.bracket
    assert result.floor_certain
    assert result.analytic_threshold == 74
    assert 74 <= lo < hi <= 75
    assert result.ceiling == 75


def test_coarse_tolerance_ceiling_covers_the_root():
    fine = find_root(ThresholdFunction.fk(TWO, 1))
    coarse = find_root(ThresholdFunction.fk(TWO, 1), tolerance=1100)
    assert coarse.floor_certain
    assert coarse.analytic_threshold == fine.analytic_threshold
    assert coarse.ceiling >= fine.root_float
    assert coarse.bracket[1] - coarse.bracket[0] <= 1


@dataclass(frozen=True)
class SignTable:
    """Negative on [2, 5], positive on (5, 7), negative again until 100."""

    label: str = "early-dip"

    def sign(self, x, precision_bits=64, precision_cap=4096):
        if 5 < x < 7 or x >= 100:
            return 1, precision_bits
        return -1, precision_bits


def test_early_sign_change_gives_leftmost_root():
    result = find_root(SignTable())
    assert result.monotonicity_violated
    assert result.analytic_threshold == 5
    assert result.floor_certain
    assert 5 <= result.bracket[0] < result.bracket[1] <= Fraction(51, 10)


def test_fk_positive_on_samples_above_threshold():
    fn = ThresholdFunction.fk(TWO, 1)
    big_n = find_root(fn).analytic_threshold
    for n in sample_points(big_n + 1, 10 * big_n, 40, seed=11):
        assert fn.sign(Fraction(n))[0] == 1, n
