# The MIT License (MIT)
# Copyright © 2023 Opentensor Foundation

# Permission is hereby granted, free of charge, to any person obtaining a copy of this software and associated
# documentation files (the “Software”), to deal in the Software without restriction, including without limitation
# the rights to use, copy, modify, merge, publish, distribute, sublicense, and/or sell copies of the Software,
# and to permit persons to whom the Software is furnished to do so, subject to the following conditions:

# The above copyright notice and this permission notice shall be included in all copies or substantial portions of
# the Software.

# THE SOFTWARE IS PROVIDED “AS IS”, WITHOUT WARRANTY OF ANY KIND, EXPRESS OR IMPLIED, INCLUDING BUT NOT LIMITED TO
# THE WARRANTIES OF MERCHANTABILITY, FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL
# THE AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER LIABILITY, WHETHER IN AN ACTION
# OF CONTRACT, TORT OR OTHERWISE, ARISING FROM, OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER
# DEALINGS IN THE SOFTWARE.

import math
from fractions import Fraction
from functools import lru_cache

from rich.text import Text

from PrimeBound.base.exact_compare import ExactConstant
from PrimeBound.base.prime_table import PrimeTable, build_prime_table
from PrimeBound.verify.inequalities import InequalityParams


class CLOSE_IN_VALUE:
    value: float | int | Fraction
    tolerance: float | int | Fraction

    def __init__(
        self,
        value: float | int | Fraction,
        tolerance: float | int | Fraction = 0.0,
    ) -> None:
        self.value = value
        self.tolerance = tolerance

    def __eq__(self, __o: float | int | Fraction) -> bool:
        # True if __o \in [value - tolerance, value + tolerance]
        # or if value \in [__o - tolerance, __o + tolerance]
        return (
            (self.value - self.tolerance) <= __o
            and __o <= (self.value + self.tolerance)
        ) or (
            (__o - self.tolerance) <= self.value
            and self.value <= (__o + self.tolerance)
        )

    def __repr__(self) -> str:
        return f"{self.value} ± {self.tolerance}"


def is_prime_by_trial_division(m: int) -> bool:
    if m < 2:
        return False
    for d in range(2, math.isqrt(m) + 1):
        if m % d == 0:
            return False
    return True


def trial_division_primes(limit: int) -> list[int]:
    """Primes up to limit by trial division against the primes found so far."""
    primes: list[int] = []
    for m in range(2, limit + 1):
        root = math.isqrt(m)
        for p in primes:
            if p > root:
                primes.append(m)
                break
            if m % p == 0:
                break
        else:
            primes.append(m)
    return primes


@lru_cache(maxsize=4)
def shared_table(limit: int = 300_000) -> PrimeTable:
    """One table per limit for the whole session; sieving is the slow part."""
    return build_prime_table(limit)


def make_params(c: str | None = None, k: int | None = None, limit: int = 300_000) -> InequalityParams:
    constant = None if c is None else ExactConstant.rational(Fraction(c))
    return InequalityParams(table=shared_table(limit), c=constant, k=k)


def remove_rich_syntax(text: str) -> str:
    """
    Removes rich syntax from the given text.
    Removes markup and ansi syntax.
    """
    output_no_syntax = Text.from_ansi(Text.from_markup(text).plain).plain

    return output_no_syntax
