import math
import random
from fractions import Fraction

import pytest
from mpmath import iv

from PrimeBound.base.exact_compare import (
    ConstantKind,
    ExactConstant,
    VerdictStatus,
    compare_bigint_vs_power,
    compare_power_vs_power,
    decide_positive,
    log_enclosure,
    parse_constant,
    precision_ladder,
    working_precision,
)
from PrimeBound.errors import DomainError, ParseError

from .helpers import CLOSE_IN_VALUE

TWO = ExactConstant.rational(2)


def test_zhang_shaped_comparison_fails():
    # 20^12 against 2^73
    verdict = compare_power_vs_power(20, 12, TWO, 73)
    assert verdict.status is VerdictStatus.FAILS
    assert verdict.precision_used is None
    assert verdict.margin < 0


def test_primorial_of_ten_beats_two_to_31():
    verdict = compare_bigint_vs_power(6469693230, TWO, 31)
    assert verdict.holds
    assert verdict.margin == CLOSE_IN_VALUE(math.log(6469693230) - 31 * math.log(2), 1e-9)


def test_primorial_of_four_loses_to_two_to_11():
    assert compare_bigint_vs_power(210, TWO, 11).fails


@pytest.mark.parametrize(
    "base, exp, c, cexp",
    [(2, 10, 4, 5), (9, 1, 3, 2), (4, 3, 8, 2)],
)
def test_equality_fails_strict_inequality(base, exp, c, cexp):
    assert compare_power_vs_power(base, exp, ExactConstant.rational(c), cexp).fails


def test_zero_exponents():
    assert compare_power_vs_power(5, 0, TWO, 0).fails  # 1 > 1
    assert compare_power_vs_power(5, 1, TWO, 0).holds
    assert compare_power_vs_power(5, 0, TWO, 1).fails


def test_rational_verdicts_match_native_comparison():
    rng = random.Random(20240101)
    for _ in range(1000):
        base = rng.randint(2, 60)
        exp = rng.randint(0, 40)
        c = Fraction(rng.randint(1, 50), rng.randint(1, 20))
        cexp = rng.randint(0, 40)
        expected = Fraction(base) ** exp > c**cexp
        verdict = compare_power_vs_power(base, exp, ExactConstant.rational(c), cexp)
        assert verdict.holds is expected, (base, exp, c, cexp)

        lhs = rng.randint(1, 10**12)
        expected = lhs > c**cexp
        verdict = compare_bigint_vs_power(lhs, ExactConstant.rational(c), cexp)
        assert verdict.holds is expected, (lhs, c, cexp)


@pytest.mark.parametrize(
    "base, exp, cexp",
    [(1, 3, 2), (0, 3, 2), (5, -1, 2), (5, 1, -2)],
)
def test_bad_arguments(base, exp, cexp):
    with pytest.raises(DomainError):
        compare_power_vs_power(base, exp, TWO, cexp)


def test_enclosure_constant_comparison():
    c = parse_constant("e-1/1000")
    assert c.kind is ConstantKind.ENCLOSURE
    verdict = compare_power_vs_power(3, 1, c, 1)
    assert verdict.holds
    assert verdict.precision_used == 64
    assert compare_power_vs_power(2, 1, c, 1).fails
    # 2^100 against (e - 0.001)^69: log gap is about 0.33
    assert compare_power_vs_power(2, 100, c, 69).holds
    assert compare_bigint_vs_power(2**100, c, 70).fails


@pytest.mark.parametrize(
    "text, value",
    [("2", Fraction(2)), ("3/2", Fraction(3, 2)), ("2.5", Fraction(5, 2)), (" 1.001 ", Fraction(1001, 1000))],
)
def test_parse_rational(text, value):
    c = parse_constant(text)
    assert c.is_rational
    assert c.value == value


@pytest.mark.parametrize("text", ["sqrt(5)", "e - 1/1000", "pi - 1", "exp(1/2)", "log(10)"])
def test_parse_expression(text):
    c = parse_constant(text)
    assert c.kind is ConstantKind.ENCLOSURE
    lo, hi = c.bounds()
    assert 1 < lo <= hi < math.e


@pytest.mark.parametrize("text", ["1", "3", "0.5", "e", "e + 1/1000", "-2"])
def test_parse_outside_theorem_range(text):
    with pytest.raises(DomainError):
        parse_constant(text)


def test_parse_without_range_check():
    assert parse_constant("3", check_range=False).value == 3


@pytest.mark.parametrize(
    "text",
    ["", "   ", "abc", "2 +", "__import__('os')", "sin(1)", "[2]", "lambda: 2", "'2'"],
)
def test_parse_garbage(text):
    with pytest.raises(ParseError):
        parse_constant(text)


def test_constant_pickles_as_text():
    import pickle

    c = parse_constant("sqrt(5)")
    clone = pickle.loads(pickle.dumps(c))
    assert clone == c
    assert clone.bounds() == c.bounds()


def test_log_enclosure_width_contract():
    for x, bits in [(113, 64), (Fraction(3, 2), 64), (10**30, 128), (2, 53)]:
        enclosure = log_enclosure(x, bits)
        assert enclosure.lower <= enclosure.upper
        assert enclosure.width <= 2 ** (1 - bits) * max(1, abs(math.log(Fraction(x))))
        assert enclosure.lower == CLOSE_IN_VALUE(math.log(Fraction(x)), 1e-12)


def test_log_enclosure_domain():
    with pytest.raises(DomainError):
        log_enclosure(0, 64)
    with pytest.raises(DomainError):
        log_enclosure(-2, 64)


def test_undecided_after_cap():
    def straddling(bits):
        return iv.mpf([-1, 1])

    verdict = decide_positive(straddling, precision_bits=64, precision_cap=256)
    assert verdict.undecided
    assert verdict.precision_used == 256


def test_precision_escalates_until_certain():
    # log(2^200 + 1) - 200 log 2 is about 6e-61, invisible at 64 bits.
    def tiny_gap(bits):
        return iv.log(iv.mpf(2**200 + 1)) - 200 * iv.log(2)

    verdict = decide_positive(tiny_gap, precision_bits=64, precision_cap=4096)
    assert verdict.holds
    assert verdict.precision_used > 64


def test_precision_ladder():
    assert list(precision_ladder(64, 4096)) == [64, 128, 256, 512, 1024, 2048, 4096]
    assert list(precision_ladder(64, 100)) == [64, 100]
    assert list(precision_ladder(512, 256)) == [256]


def test_working_precision_restores():
    saved = iv.prec
    with working_precision(300):
        assert iv.prec == 300
    assert iv.prec == saved


@pytest.mark.parametrize("text", ["2/0", "1/(e-e)"])
def test_parse_non_finite_is_rejected(text):
    with pytest.raises(ParseError):
        parse_constant(text)
    with pytest.raises(ParseError):
        parse_constant(text, check_range=False)


def test_enclosure_of_division_by_zero():
    with pytest.raises(ParseError):
        ExactConstant.enclosure("1/0")


def test_verdict_width():
    def tiny_gap(bits):
        return iv.log(iv.mpf(2**200 + 1)) - 200 * iv.log(2)

    verdict = decide_positive(tiny_gap, precision_bits=64, precision_cap=4096)
    assert verdict.width is not None
    assert 0 <= verdict.width < 1e-60
    assert compare_power_vs_power(20, 12, TWO, 73).width is None


def test_working_precision_across_threads():
    from concurrent.futures import ThreadPoolExecutor

    saved = iv.prec
    jobs = [(x, bits) for x in (3, 113, 10**30) for bits in (53, 64, 256, 1024)] * 4

    def enclose(job):
        x, bits = job
        enclosure = log_enclosure(x, bits)
        return enclosure.width <= 2 ** (1 - bits) * max(1, abs(math.log(x)))

    with ThreadPoolExecutor(max_workers=8) as pool:
        assert all(pool.map(enclose, jobs))
    assert iv.prec == saved
