"""
Threshold functions and their zeros.

f_k(x) = 1 - (log c / log x) * (1 + k/x) * log((x+k) * log(x+k)) - 1.25506 / log x
f(x)   = 1 - log 2 * (1 + 1/x) - 1.71678 / log(x * log x)

Both are evaluated with interval enclosures so every sign used by the root
search is certain. The zero x_k of f_k gives the analytic threshold
N_k = floor(x_k): Theorem 1 holds for every n > x_k.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import numpy as np
from mpmath import iv

from PrimeBound.base.exact_compare import (
    DEFAULT_PRECISION_BITS,
    DEFAULT_PRECISION_CAP,
    Enclosure,
    ExactConstant,
    certainly_positive,
    certify_c_range,
    interval_sign,
    iv_fraction,
    precision_ladder,
    working_precision,
)
from PrimeBound.errors import BracketError, ContractViolation, DomainError

logger = logging.getLogger(__name__)

# pi(x) < 1.25506 * x / log x, treated as the exact decimal it is written as.
ROSSER_PI_CONSTANT = Fraction("1.25506")
# pi(n) < 1.71678 * n / log(n log n), the appendix bound.
APPENDIX_CONSTANT = Fraction("1.71678")

BRACKET_START = Fraction(2)
DEFAULT_TOLERANCE = 1e-9
DEFAULT_HI_CAP_BITS = 1000
DEFAULT_SAMPLE_COUNT = 64


class ThresholdKind(str, Enum):
    FK = "fk"
    APPENDIX = "f_appendix"


def _as_fraction(x) -> Fraction:
    if isinstance(x, float) and not math.isfinite(x):
        raise DomainError(f"argument must be finite, got {x}")
    try:
        return Fraction(x)
    except (TypeError, ValueError) as e:
        raise DomainError(f"cannot read {x!r} as a real number") from e


def _fk_interval(x, log_c, k: int):
    log_x = iv.log(x)
    shifted = x + k
    inner = iv.log(shifted * iv.log(shifted))
    return (
        1
        - (log_c / log_x) * (1 + k / x) * inner
        - iv_fraction(ROSSER_PI_CONSTANT) / log_x
    )


def _appendix_interval(x):
    return (
        1
        - iv.log(2) * (1 + 1 / x)
        - iv_fraction(APPENDIX_CONSTANT) / iv.log(x * iv.log(x))
    )


@dataclass(frozen=True)
class ThresholdFunction:
    """Either f_k for a given (c, k), or the appendix f."""

    kind: ThresholdKind
    c: ExactConstant | None = None
    k: int = 0

    @classmethod
    def fk(cls, c: ExactConstant, k: int, certify: bool = True) -> "ThresholdFunction":
        if k < 0:
            raise DomainError(f"k must be >= 0, got {k}")
        if certify:
            certify_c_range(c)
        return cls(kind=ThresholdKind.FK, c=c, k=k)

    @classmethod
    def appendix(cls) -> "ThresholdFunction":
        return cls(kind=ThresholdKind.APPENDIX)

    @property
    def label(self) -> str:
        if self.kind is ThresholdKind.APPENDIX:
            return "f_appendix"
        return f"f_{self.k}[c={self.c.label}]"

    def enclose(self, x: Fraction, bits: int):
        """Enclosure of the function at an exact rational point."""
        with working_precision(bits):
            x_iv = iv_fraction(x)
            if self.kind is ThresholdKind.APPENDIX:
                return _appendix_interval(x_iv)
            return _fk_interval(x_iv, self.c.log_enclosure(bits), self.k)

    def sign(
        self,
        x: Fraction,
        precision_bits: int = DEFAULT_PRECISION_BITS,
        precision_cap: int = DEFAULT_PRECISION_CAP,
    ) -> tuple[int | None, int]:
        """Certified sign at x and the precision that settled it (None if undecided)."""
        bits = precision_bits
        for bits in precision_ladder(precision_bits, precision_cap):
            with working_precision(bits):
                s = interval_sign(self.enclose(x, bits))
            if s is not None:
                return s, bits
        return None, bits


def _check_fk_domain(x: Fraction, k: int, bits: int) -> None:
    if k < 0:
        raise DomainError(f"k must be >= 0, got {k}")
    if x <= 1:
        raise DomainError(f"f_k needs x > 1, got {x}")
    with working_precision(bits):
        shifted = iv_fraction(x + k)
        if not certainly_positive(shifted * iv.log(shifted) - 1):
            raise DomainError(f"f_k needs (x+k)*log(x+k) > 1, got x={x}, k={k}")


def eval_fk(
    x,
    c: ExactConstant,
    k: int,
    precision_bits: int = DEFAULT_PRECISION_BITS,
    enclosure: bool = False,
) -> float | Enclosure:
    """
    Evaluate f_k at x.

    Returns the midpoint as a float, or with ``enclosure=True`` a certified
    Enclosure containing the exact value.
    """
    x = _as_fraction(x)
    _check_fk_domain(x, k, precision_bits)
    fn = ThresholdFunction(kind=ThresholdKind.FK, c=c, k=k)
    value = fn.enclose(x, precision_bits)
    if enclosure:
        return Enclosure(interval=value, precision_bits=precision_bits)
    with working_precision(precision_bits):
        return float(value.mid)


def eval_f_appendix(
    x, precision_bits: int = DEFAULT_PRECISION_BITS, enclosure: bool = False
) -> float | Enclosure:
    """Evaluate the appendix function f(x) = 1 - log2*(1+1/x) - 1.71678/log(x log x)."""
    x = _as_fraction(x)
    if x < 2:
        raise DomainError(f"f_appendix needs x >= 2, got {x}")
    value = ThresholdFunction.appendix().enclose(x, precision_bits)
    if enclosure:
        return Enclosure(interval=value, precision_bits=precision_bits)
    with working_precision(precision_bits):
        return float(value.mid)


@dataclass(frozen=True)
class RootResult:
    """
    Zero of a threshold function.

    fn(bracket[0]) < 0 < fn(bracket[1]) with certified signs. The bracket is
    narrowed to lie inside one unit interval, so analytic_threshold is the
    floor of the zero whenever floor_certain is set.
    """

    function: str
    root: Fraction
    bracket: tuple[Fraction, Fraction]
    iterations: int
    tolerance: float
    analytic_threshold: int
    precision_used: int
    floor_certain: bool
    monotonicity_violated: bool
    samples_checked: int

    @property
    def root_float(self) -> float:
        return float(self.root)

    @property
    def width(self) -> float:
        return float(self.bracket[1] - self.bracket[0])

    @property
    def ceiling(self) -> int:
        """Smallest integer not below the root; taken from the upper bracket end."""
        return math.ceil(self.bracket[1])


def _bisect(fn, lo, hi, tol, precision_bits, precision_cap):
    iterations = 0
    used = precision_bits
    while hi - lo > tol:
        mid = (lo + hi) / 2
        s, bits = fn.sign(mid, precision_bits, precision_cap)
        used = max(used, bits)
        iterations += 1
        if s == -1:
            lo = mid
        elif s == 1:
            hi = mid
        else:
            logger.warning(
                f"{fn.label}: sign undecided at {float(mid)} with {precision_cap} bits, stopping bisection"
            )
            break
    return lo, hi, iterations, used


def _narrow_to_unit(fn, lo, hi, precision_bits, precision_cap):
    """
    Bisect on integers until no integer lies strictly inside (lo, hi).

    The root is then in (floor(lo), floor(lo) + 1), so its floor is certain.
    Returns (lo, hi, floor, certain, steps, bits). When a sign is undecided the
    floor falls back to ceil(hi) - 1, which is never below the true floor.
    """
    used = precision_bits
    steps = 0
    while math.ceil(hi) - 1 > math.floor(lo):
        m = Fraction(math.floor((lo + hi) / 2))
        if m <= lo:
            m += 1
        s, bits = fn.sign(m, precision_bits, precision_cap)
        used = max(used, bits)
        steps += 1
        if s == 1:
            hi = m
        elif s == -1:
            lo = m
        else:
            logger.warning(f"{fn.label}: sign undecided at {m}, floor of the root not certified")
            return lo, hi, math.ceil(hi) - 1, False, steps, used
    return lo, hi, math.floor(lo), True, steps, used


def _sample_points(lo: Fraction, upper: Fraction, count: int) -> list[Fraction]:
    top = float(upper)
    grid = np.unique(
        np.concatenate(
            [np.geomspace(float(lo), top, count), np.linspace(float(lo), top, count)]
        )
    )
    points = [Fraction(float(v)) for v in grid]
    return [p for p in points if lo <= p <= upper]


def find_root(
    fn: ThresholdFunction,
    tolerance: float = DEFAULT_TOLERANCE,
    precision_bits: int = DEFAULT_PRECISION_BITS,
    precision_cap: int = DEFAULT_PRECISION_CAP,
    hi_cap_bits: int = DEFAULT_HI_CAP_BITS,
    samples: int = DEFAULT_SAMPLE_COUNT,
) -> RootResult:
    """
    Locate the zero of a threshold function by bracketing and bisection.

    The bracket starts at lo = 2, where the function must be negative, and hi
    doubles until the function is positive. After bisection the function is
    sampled on [2, root]; an earlier sign change means the monotonicity claim
    failed, and the leftmost detected root is returned with a flag.

    Raises:
        ContractViolation: when fn(2) is not certainly negative.
        BracketError: when no positive value is found below 2^hi_cap_bits.
    """
    tol = Fraction(tolerance)
    if tol <= 0:
        raise DomainError(f"tolerance must be > 0, got {tolerance}")
    if samples < DEFAULT_SAMPLE_COUNT:
        raise DomainError(f"need at least {DEFAULT_SAMPLE_COUNT} samples, got {samples}")

    s, used = fn.sign(BRACKET_START, precision_bits, precision_cap)
    if s != -1:
        raise ContractViolation(
            f"{fn.label}(2) is not certainly negative, contradicting the bracketing claim"
        )

    hi_cap = Fraction(2) ** hi_cap_bits
    lo, hi = BRACKET_START, 2 * BRACKET_START
    while True:
        s, bits = fn.sign(hi, precision_bits, precision_cap)
        used = max(used, bits)
        if s == 1:
            break
        if s == -1:
            lo = hi
        hi *= 2
        if hi > hi_cap:
            raise BracketError(
                f"{fn.label}: no sign change below 2^{hi_cap_bits}"
            )
    logger.debug(f"{fn.label}: bracket [{float(lo)}, {float(hi)}]")

    lo, hi, iterations, bits = _bisect(fn, lo, hi, tol, precision_bits, precision_cap)
    used = max(used, bits)

    violated = False
    points = _sample_points(BRACKET_START, lo, samples)
    last_negative = BRACKET_START
    for x in points:
        s, bits = fn.sign(x, precision_bits, precision_cap)
        used = max(used, bits)
        if s == 1:
            violated = True
            logger.warning(
                f"{fn.label}: positive at {float(x)} below the bracketed root {float(lo)}"
            )
            lo, hi, extra, bits = _bisect(
                fn, last_negative, x, tol, precision_bits, precision_cap
            )
            iterations += extra
            used = max(used, bits)
            break
        if s == -1:
            last_negative = x

    lo, hi, floor, certain, steps, bits = _narrow_to_unit(
        fn, lo, hi, precision_bits, precision_cap
    )
    iterations += steps
    used = max(used, bits)

    result = RootResult(
        function=fn.label,
        root=(lo + hi) / 2,
        bracket=(lo, hi),
        iterations=iterations,
        tolerance=float(tolerance),
        analytic_threshold=floor,
        precision_used=used,
        floor_certain=certain,
        monotonicity_violated=violated,
        samples_checked=len(points),
    )
    logger.info(
        f"{fn.label}: root {result.root_float:.12g} in {iterations} iterations, N = {floor}"
    )
    return result
