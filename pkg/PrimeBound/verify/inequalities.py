"""
The catalogue of prime inequalities, each a predicate over a positive integer n.

    THEOREM1     n^(n - pi(n)) > c^(p_{n+k})
    COROLLARY1   p_1 * ... * p_n > c^(p_{n+k})
    ZHANG        p_{n+1}^(n - pi(n)) > 2^(p_{n+1})
    PANAITOPOL   p_1 * ... * p_n > p_{n+1}^(n - pi(n))
    ROSSER_PI    pi(n) < 1.25506 * n / log n
    ROSSER_PN    p_n < n * log(n * log n)
    APPENDIX_A   pi(n) < 1.71678 * n / log(n * log n)
"""

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from mpmath import iv

from PrimeBound.base.exact_compare import (
    DEFAULT_PRECISION_BITS,
    DEFAULT_PRECISION_CAP,
    CheckVerdict,
    ExactConstant,
    VerdictStatus,
    certify_c_range,
    compare_bigint_vs_power,
    compare_power_vs_power,
    decide_positive,
    iv_fraction,
)
from PrimeBound.base.prime_table import PrimeTable
from PrimeBound.bounds.threshold import (
    APPENDIX_CONSTANT,
    ROSSER_PI_CONSTANT,
    ThresholdFunction,
)
from PrimeBound.errors import DomainError

logger = logging.getLogger(__name__)

TWO = ExactConstant.rational(2)


class InequalityId(str, Enum):
    THEOREM1 = "THEOREM1"
    COROLLARY1 = "COROLLARY1"
    ZHANG = "ZHANG"
    PANAITOPOL = "PANAITOPOL"
    ROSSER_PI = "ROSSER_PI"
    ROSSER_PN = "ROSSER_PN"
    APPENDIX_A = "APPENDIX_A"

    @classmethod
    def parse(cls, name: str) -> "InequalityId":
        try:
            return cls(name.strip().upper())
        except ValueError as e:
            known = ", ".join(m.value.lower() for m in cls)
            raise DomainError(f"unknown inequality {name!r}, expected one of {known}") from e

    @property
    def takes_parameters(self) -> bool:
        return self in (InequalityId.THEOREM1, InequalityId.COROLLARY1)

    @property
    def domain_start(self) -> int:
        return 1 if self is InequalityId.ROSSER_PN else 2

    def max_prime_index(self, n: int, k: int = 0) -> int:
        """Largest prime index the predicate reads at n."""
        if self.takes_parameters:
            return n + k
        if self in (InequalityId.ZHANG, InequalityId.PANAITOPOL):
            return n + 1
        if self is InequalityId.ROSSER_PN:
            return n
        return 1


@dataclass(frozen=True)
class InequalityParams:
    """
    Parameters shared by every check of a run.

    c and k are only read by THEOREM1 and COROLLARY1; ZHANG has c = 2 and
    k = 1 built in. When c is given it is certified to lie in (1, e).
    """

    table: PrimeTable
    c: ExactConstant | None = None
    k: int | None = None
    precision_bits: int = DEFAULT_PRECISION_BITS
    precision_cap: int = DEFAULT_PRECISION_CAP

    def __post_init__(self):
        if self.k is not None and self.k < 0:
            raise DomainError(f"k must be >= 0, got {self.k}")
        if self.c is not None:
            certify_c_range(self.c, self.precision_bits, self.precision_cap)

    @property
    def offset(self) -> int:
        return self.k or 0

    def require_for(self, inequality: InequalityId) -> None:
        if inequality.takes_parameters and (self.c is None or self.k is None):
            raise DomainError(f"{inequality.value} needs both c and k")

    def with_table(self, table: PrimeTable) -> "InequalityParams":
        return InequalityParams(
            table=table,
            c=self.c,
            k=self.k,
            precision_bits=self.precision_bits,
            precision_cap=self.precision_cap,
        )


def _composite_count(table: PrimeTable, n: int) -> int:
    return n - table.prime_count(n)


def _check_theorem1(n: int, params: InequalityParams) -> CheckVerdict:
    table = params.table
    return compare_power_vs_power(
        n,
        _composite_count(table, n),
        params.c,
        table.nth_prime(n + params.k),
        params.precision_bits,
        params.precision_cap,
    )


def _check_corollary1(n: int, params: InequalityParams) -> CheckVerdict:
    table = params.table
    exponent = table.nth_prime(n + params.k)
    return compare_bigint_vs_power(
        table.primorial(n),
        params.c,
        exponent,
        params.precision_bits,
        params.precision_cap,
    )


def _check_zhang(n: int, params: InequalityParams) -> CheckVerdict:
    table = params.table
    p_next = table.nth_prime(n + 1)
    return compare_power_vs_power(p_next, _composite_count(table, n), TWO, p_next)


def _check_panaitopol(n: int, params: InequalityParams) -> CheckVerdict:
    table = params.table
    p_next = table.nth_prime(n + 1)
    exponent = _composite_count(table, n)
    return compare_bigint_vs_power(
        table.primorial(n), ExactConstant.rational(p_next), exponent
    )


def _check_rosser_pi(n: int, params: InequalityParams) -> CheckVerdict:
    count = params.table.prime_count(n)

    # 1.25506 * n - pi(n) * log n > 0
    def gap_at(bits: int):
        return iv_fraction(ROSSER_PI_CONSTANT) * n - count * iv.log(iv.mpf(n))

    return decide_positive(gap_at, params.precision_bits, params.precision_cap)


def _check_rosser_pn(n: int, params: InequalityParams) -> CheckVerdict:
    p_n = params.table.nth_prime(n)
    if n == 1:
        # n * log(n log n) is undefined at n = 1.
        return CheckVerdict(VerdictStatus.FAILS)

    def gap_at(bits: int):
        x = iv.mpf(n)
        return x * iv.log(x * iv.log(x)) - p_n

    return decide_positive(gap_at, params.precision_bits, params.precision_cap)


def _check_appendix_a(n: int, params: InequalityParams) -> CheckVerdict:
    count = params.table.prime_count(n)

    # 1.71678 * n - pi(n) * log(n log n) > 0
    def gap_at(bits: int):
        x = iv.mpf(n)
        return iv_fraction(APPENDIX_CONSTANT) * n - count * iv.log(x * iv.log(x))

    return decide_positive(gap_at, params.precision_bits, params.precision_cap)


_CHECKS = {
    InequalityId.THEOREM1: _check_theorem1,
    InequalityId.COROLLARY1: _check_corollary1,
    InequalityId.ZHANG: _check_zhang,
    InequalityId.PANAITOPOL: _check_panaitopol,
    InequalityId.ROSSER_PI: _check_rosser_pi,
    InequalityId.ROSSER_PN: _check_rosser_pn,
    InequalityId.APPENDIX_A: _check_appendix_a,
}


def check_inequality(
    inequality: InequalityId, n: int, params: InequalityParams
) -> CheckVerdict:
    """
    Decide one inequality at n.

    Raises:
        DomainError: n below the predicate's domain, or c / k missing.
        TableRangeError: the table cannot supply p_{n+k}, p_{n+1} or pi(n).
    """
    params.require_for(inequality)
    if n < inequality.domain_start:
        raise DomainError(f"{inequality.value} needs n >= {inequality.domain_start}, got {n}")
    return _CHECKS[inequality](n, params)


@dataclass(frozen=True)
class ChainLink:
    name: str
    statement: str
    verdict: CheckVerdict


@dataclass(frozen=True)
class ProofChain:
    """
    The links of the Theorem 1 argument evaluated at one n.

    If f_k(n) > 0, the pi bound at n and the p_n bound at n + k all hold,
    then THEOREM1 must hold at n.
    """

    n: int
    links: list[ChainLink]

    def link(self, name: str) -> ChainLink:
        return next(link for link in self.links if link.name == name)

    @property
    def premises_hold(self) -> bool:
        return all(link.verdict.holds for link in self.links[:-1])

    @property
    def broken_links(self) -> list[str]:
        return [link.name for link in self.links[:-1] if not link.verdict.holds]

    @property
    def consistent(self) -> bool:
        return not self.premises_hold or self.links[-1].verdict.holds


def proof_chain(n: int, params: InequalityParams) -> ProofChain:
    """Evaluate each step of the Theorem 1 argument at n."""
    params.require_for(InequalityId.THEOREM1)
    if n < 2:
        raise DomainError(f"proof chain needs n >= 2, got {n}")

    fn = ThresholdFunction.fk(params.c, params.k, certify=False)
    sign, bits = fn.sign(Fraction(n), params.precision_bits, params.precision_cap)
    if sign is None:
        status = VerdictStatus.UNDECIDED
    else:
        status = VerdictStatus.HOLDS if sign == 1 else VerdictStatus.FAILS
    with_margin = fn.enclose(Fraction(n), bits)

    k = params.k
    links = [
        ChainLink(
            "threshold",
            f"f_{k}({n}) > 0",
            CheckVerdict(status, bits, float(with_margin.mid), float(with_margin.delta)),
        ),
        ChainLink(
            "rosser_pi",
            f"pi({n}) < 1.25506 * {n} / log {n}",
            check_inequality(InequalityId.ROSSER_PI, n, params),
        ),
        ChainLink(
            "rosser_pn",
            f"p_{n + k} < m log(m log m) at m = {n + k}",
            check_inequality(InequalityId.ROSSER_PN, n + k, params),
        ),
        ChainLink(
            "theorem1",
            f"{n}^({n} - pi({n})) > c^p_{n + k}",
            check_inequality(InequalityId.THEOREM1, n, params),
        ),
    ]
    chain = ProofChain(n=n, links=links)
    if not chain.consistent:
        logger.error(f"proof chain at n={n}: premises hold but THEOREM1 fails")
    return chain
