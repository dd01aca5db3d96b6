"""
Exact and interval-certified comparisons of the form A^a vs c^b.

Rational constants are always decided by big-integer cross multiplication.
Irrational constants are handled as interval enclosures (``mpmath.iv``) whose
precision is doubled until the sign of the log-scale gap is certain, or a cap
is reached and the verdict is Undecided. All logarithms are natural.
"""

import ast
import logging
import math
import threading
from collections.abc import Callable, Iterator
from contextlib import contextmanager
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from mpmath import iv
from mpmath.libmp import finf, fnan, fninf

from PrimeBound.errors import DomainError, ParseError

logger = logging.getLogger(__name__)

DEFAULT_PRECISION_BITS = 64
DEFAULT_PRECISION_CAP = 4096

# Extra bits carried internally so returned enclosures meet their width contract.
GUARD_BITS = 10

# iv.prec is shared by the whole process; one thread at a time may change it.
_precision_lock = threading.RLock()


@contextmanager
def working_precision(bits: int) -> Iterator[None]:
    """
    Temporarily set the interval context precision.

    Nested blocks in one thread are fine; other threads wait until the
    outermost block exits. Scan workers are processes and never contend.
    """
    with _precision_lock:
        saved = iv.prec
        iv.prec = bits
        try:
            yield
        finally:
            iv.prec = saved


def precision_ladder(start: int, cap: int) -> Iterator[int]:
    """Yield start, 2*start, 4*start, ... and finally cap itself."""
    bits = max(2, min(start, cap))
    while bits < cap:
        yield bits
        bits *= 2
    yield cap


def iv_fraction(value: Fraction | int):
    """Outward-rounded enclosure of an exact rational at the current precision."""
    value = Fraction(value)
    if value.denominator == 1:
        return iv.mpf(value.numerator)
    return iv.mpf(value.numerator) / iv.mpf(value.denominator)


def is_finite_interval(x) -> bool:
    lo, hi = x._mpi_
    return not ({lo, hi} & {finf, fninf, fnan})


def certainly_positive(x) -> bool:
    return (x.a > 0) is True


def certainly_negative(x) -> bool:
    return (x.b < 0) is True


def certainly_nonpositive(x) -> bool:
    return (x.b <= 0) is True


def interval_sign(x) -> int | None:
    """+1 or -1 when the sign of the enclosure is certain, otherwise None."""
    if certainly_positive(x):
        return 1
    if certainly_negative(x):
        return -1
    return None


class ConstantKind(str, Enum):
    RATIONAL = "rational"
    ENCLOSURE = "enclosure"


_IV_NAMES = {"e": lambda: iv.e, "pi": lambda: iv.pi}
_IV_FUNCTIONS = {
    "sqrt": lambda x: iv.sqrt(x),
    "log": lambda x: iv.log(x),
    "exp": lambda x: iv.exp(x),
}
_IV_BINARY = {
    ast.Add: lambda a, b: a + b,
    ast.Sub: lambda a, b: a - b,
    ast.Mult: lambda a, b: a * b,
    ast.Div: lambda a, b: a / b,
    ast.Pow: lambda a, b: a**b,
}


def _evaluate(node):
    if isinstance(node, ast.Expression):
        return _evaluate(node.body)
    if isinstance(node, ast.Constant):
        if isinstance(node.value, bool) or not isinstance(node.value, int | float):
            raise ParseError(f"unsupported literal {node.value!r}")
        return iv_fraction(Fraction(repr(node.value)))
    if isinstance(node, ast.Name):
        if node.id not in _IV_NAMES:
            raise ParseError(f"unknown name {node.id!r}")
        return _IV_NAMES[node.id]()
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub | ast.UAdd):
        operand = _evaluate(node.operand)
        return -operand if isinstance(node.op, ast.USub) else operand
    if isinstance(node, ast.BinOp) and type(node.op) in _IV_BINARY:
        return _IV_BINARY[type(node.op)](_evaluate(node.left), _evaluate(node.right))
    if isinstance(node, ast.Call):
        name = node.func.id if isinstance(node.func, ast.Name) else None
        if name not in _IV_FUNCTIONS or len(node.args) != 1 or node.keywords:
            raise ParseError(f"unsupported call {ast.dump(node.func)}")
        return _IV_FUNCTIONS[name](_evaluate(node.args[0]))
    raise ParseError(f"unsupported syntax {type(node).__name__}")


@dataclass(frozen=True)
class ExactConstant:
    """
    A real parameter held either as an exact rational or as an expression that
    can be enclosed at any precision. Expressions are kept as text so the
    constant pickles cleanly into scan workers.
    """

    kind: ConstantKind
    value: Fraction | None = None
    expression: str | None = None
    precision_bits: int = DEFAULT_PRECISION_BITS

    @classmethod
    def rational(cls, value: Fraction | int | str) -> "ExactConstant":
        return cls(kind=ConstantKind.RATIONAL, value=Fraction(value))

    @classmethod
    def enclosure(
        cls, expression: str, precision_bits: int = DEFAULT_PRECISION_BITS
    ) -> "ExactConstant":
        constant = cls(
            kind=ConstantKind.ENCLOSURE,
            expression=expression,
            precision_bits=precision_bits,
        )
        # Evaluate once so malformed expressions fail at construction.
        try:
            interval = constant.enclose(precision_bits)
        except ParseError:
            raise
        except ZeroDivisionError as e:
            raise ParseError(f"{expression!r} divides by zero") from e
        except (ValueError, TypeError) as e:
            raise DomainError(f"cannot enclose {expression!r}: {e}") from e
        with working_precision(precision_bits):
            if not is_finite_interval(interval):
                raise ParseError(f"{expression!r} does not evaluate to a finite number")
            if (interval.a <= interval.b) is not True:
                raise DomainError(f"{expression!r} does not evaluate to a real enclosure")
        return constant

    @property
    def is_rational(self) -> bool:
        return self.kind is ConstantKind.RATIONAL

    @property
    def numerator(self) -> int:
        return self.value.numerator

    @property
    def denominator(self) -> int:
        return self.value.denominator

    @property
    def label(self) -> str:
        return str(self.value) if self.is_rational else self.expression

    def enclose(self, bits: int):
        """Interval containing the constant, computed at ``bits`` of precision."""
        with working_precision(bits):
            if self.is_rational:
                return iv_fraction(self.value)
            return _evaluate(ast.parse(self.expression, mode="eval"))

    def log_enclosure(self, bits: int):
        with working_precision(bits):
            return iv.log(self.enclose(bits))

    def bounds(self, bits: int | None = None) -> tuple[float, float]:
        """Lower and upper ends of the enclosure, rounded to floats for display."""
        bits = bits or self.precision_bits
        with working_precision(bits):
            interval = self.enclose(bits)
            return float(interval.a), float(interval.b)

    def log_float(self) -> float:
        if self.is_rational:
            return math.log(self.numerator) - math.log(self.denominator)
        with working_precision(self.precision_bits):
            return float(self.log_enclosure(self.precision_bits).mid)


def certify_c_range(
    c: ExactConstant,
    precision_bits: int = DEFAULT_PRECISION_BITS,
    precision_cap: int = DEFAULT_PRECISION_CAP,
) -> None:
    """
    Certify 1 < c < e, the hypothesis of Theorem 1.

    Raises:
        DomainError: when c <= 1, c >= e, or the enclosure cannot separate c
            from those bounds below the precision cap.
    """
    if c.is_rational and c.value <= 1:
        raise DomainError(f"c = {c.label} violates Theorem 1's hypothesis 1 < c < e")
    for bits in precision_ladder(max(precision_bits, 64), precision_cap):
        with working_precision(bits):
            value = c.enclose(bits)
            to_one = value - 1
            to_e = iv.e - value
            if certainly_positive(to_one) and certainly_positive(to_e):
                return
            if certainly_nonpositive(to_one) or certainly_nonpositive(to_e):
                raise DomainError(
                    f"c = {c.label} violates Theorem 1's hypothesis 1 < c < e"
                )
    raise DomainError(
        f"c = {c.label} could not be separated from 1 and e at {precision_cap} bits"
    )


def parse_constant(
    text: str,
    check_range: bool = True,
    precision_bits: int = DEFAULT_PRECISION_BITS,
    precision_cap: int = DEFAULT_PRECISION_CAP,
) -> ExactConstant:
    """
    Parse an integer, a fraction "p/q", a finite decimal or an expression over
    e, pi, sqrt, log and exp.

    Integers, fractions and decimals become exact rationals ("2.5" is 5/2, no
    binary float round trip). Expressions become enclosures. When
    ``check_range`` is set, the value must be certified to lie in (1, e).
    """
    if not isinstance(text, str) or not text.strip():
        raise ParseError(f"cannot parse constant from {text!r}")
    text = text.strip()
    try:
        constant = ExactConstant.rational(Fraction(text))
    except (ValueError, ZeroDivisionError):
        try:
            tree = ast.parse(text, mode="eval")
        except SyntaxError as e:
            raise ParseError(f"cannot parse constant from {text!r}") from e
        # Validate the syntax before any evaluation.
        _check_syntax(tree)
        constant = ExactConstant.enclosure(text, precision_bits=precision_bits)
    if check_range:
        certify_c_range(constant, precision_bits, precision_cap)
    return constant


def _check_syntax(tree: ast.AST) -> None:
    allowed = (
        ast.Expression,
        ast.Constant,
        ast.Name,
        ast.Load,
        ast.UnaryOp,
        ast.USub,
        ast.UAdd,
        ast.BinOp,
        ast.Call,
        *_IV_BINARY,
    )
    for node in ast.walk(tree):
        if not isinstance(node, allowed):
            raise ParseError(f"unsupported syntax {type(node).__name__}")


class VerdictStatus(str, Enum):
    HOLDS = "Holds"
    FAILS = "Fails"
    UNDECIDED = "Undecided"


@dataclass(frozen=True)
class CheckVerdict:
    """
    Outcome of a strict inequality at one point.

    ``margin`` is the log-scale gap (left minus right), for diagnostics only.
    ``precision_used`` and ``width``, the width of the enclosure the margin is
    the midpoint of, are set only when an interval path was taken.
    """

    status: VerdictStatus
    precision_used: int | None = None
    margin: float | None = None
    width: float | None = None

    @property
    def holds(self) -> bool:
        return self.status is VerdictStatus.HOLDS

    @property
    def fails(self) -> bool:
        return self.status is VerdictStatus.FAILS

    @property
    def undecided(self) -> bool:
        return self.status is VerdictStatus.UNDECIDED


def decide_positive(
    gap_at: Callable[[int], object],
    precision_bits: int = DEFAULT_PRECISION_BITS,
    precision_cap: int = DEFAULT_PRECISION_CAP,
) -> CheckVerdict:
    """
    Decide ``gap > 0`` where ``gap_at(bits)`` returns an enclosure of the gap.

    Holds when the enclosure is certainly positive, Fails when it is certainly
    <= 0 (equality fails a strict inequality), Undecided after the cap.
    """
    margin = width = None
    bits = precision_bits
    for bits in precision_ladder(precision_bits, precision_cap):
        with working_precision(bits):
            gap = gap_at(bits)
            margin = float(gap.mid)
            width = float(gap.delta)
            if certainly_positive(gap):
                return CheckVerdict(VerdictStatus.HOLDS, bits, margin, width)
            if certainly_nonpositive(gap):
                return CheckVerdict(VerdictStatus.FAILS, bits, margin, width)
        logger.debug(f"Gap straddles zero at {bits} bits, escalating")
    return CheckVerdict(VerdictStatus.UNDECIDED, bits, margin, width)


def _require_positive_rational(c: ExactConstant) -> None:
    if c.value <= 0:
        raise DomainError(f"constant must be positive, got {c.label}")


def compare_power_vs_power(
    base: int,
    exp: int,
    c: ExactConstant,
    cexp: int,
    precision_bits: int = DEFAULT_PRECISION_BITS,
    precision_cap: int = DEFAULT_PRECISION_CAP,
) -> CheckVerdict:
    """Decide base^exp > c^cexp."""
    if base < 2:
        raise DomainError(f"base must be >= 2, got {base}")
    if exp < 0 or cexp < 0:
        raise DomainError(f"exponents must be non-negative, got {exp} and {cexp}")

    if c.is_rational:
        _require_positive_rational(c)
        lhs = base**exp * c.denominator**cexp
        rhs = c.numerator**cexp
        margin = exp * math.log(base) - cexp * c.log_float()
        status = VerdictStatus.HOLDS if lhs > rhs else VerdictStatus.FAILS
        return CheckVerdict(status, None, margin)

    def gap_at(bits: int):
        return exp * iv.log(iv.mpf(base)) - cexp * c.log_enclosure(bits)

    return decide_positive(gap_at, precision_bits, precision_cap)


def compare_bigint_vs_power(
    lhs: int,
    c: ExactConstant,
    cexp: int,
    precision_bits: int = DEFAULT_PRECISION_BITS,
    precision_cap: int = DEFAULT_PRECISION_CAP,
) -> CheckVerdict:
    """Decide lhs > c^cexp for an arbitrary-precision integer lhs."""
    if lhs < 1:
        raise DomainError(f"left side must be >= 1, got {lhs}")
    if cexp < 0:
        raise DomainError(f"exponent must be non-negative, got {cexp}")

    if c.is_rational:
        _require_positive_rational(c)
        status = (
            VerdictStatus.HOLDS
            if lhs * c.denominator**cexp > c.numerator**cexp
            else VerdictStatus.FAILS
        )
        margin = math.log(lhs) - cexp * c.log_float()
        return CheckVerdict(status, None, margin)

    def gap_at(bits: int):
        return iv.log(iv.mpf(lhs)) - cexp * c.log_enclosure(bits)

    return decide_positive(gap_at, precision_bits, precision_cap)


@dataclass(frozen=True)
class Enclosure:
    """A certified interval together with the precision it was computed at."""

    interval: object
    precision_bits: int

    @property
    def lower(self) -> float:
        with working_precision(self.precision_bits + GUARD_BITS):
            return float(self.interval.a)

    @property
    def upper(self) -> float:
        with working_precision(self.precision_bits + GUARD_BITS):
            return float(self.interval.b)

    @property
    def width(self) -> float:
        with working_precision(self.precision_bits + GUARD_BITS):
            return float(self.interval.delta)


def log_enclosure(x: Fraction | int | str, precision_bits: int) -> Enclosure:
    """
    Enclose the natural logarithm of a positive rational.

    The returned interval satisfies hi - lo <= 2^(1 - precision_bits) * max(1, |log x|).
    """
    x = Fraction(x)
    if x <= 0:
        raise DomainError(f"log needs a positive argument, got {x}")
    if precision_bits < 2:
        raise DomainError(f"precision must be >= 2 bits, got {precision_bits}")
    bits = precision_bits + GUARD_BITS
    with working_precision(bits):
        interval = iv.log(iv_fraction(x))
    return Enclosure(interval=interval, precision_bits=precision_bits)
