import logging
import math
import threading
from dataclasses import dataclass, field

import numpy as np

from PrimeBound.errors import DomainError, ResourceError, TableRangeError

logger = logging.getLogger(__name__)

# Bytes per sieved integer: one flag byte plus one int32 prime count.
BYTES_PER_INTEGER = 5
DEFAULT_MEMORY_BUDGET_MIB = 1024

# Primorial prefix products are checkpointed every this many primes.
PRIMORIAL_STRIDE = 128


def sieve_flags(limit: int) -> np.ndarray:
    """
    Return a boolean array where flags[i] is True iff i is prime, for 0 <= i <= limit.
    """
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return flags


def nth_prime_upper_bound(m: int) -> int:
    """Upper bound for p_m from p_m < m*log(m*log m), valid for m >= 6."""
    if m < 6:
        return 13
    return math.ceil(m * math.log(m * math.log(m)))


def required_sieve_limit(prime_index: int, value: int = 2, safety: int = 2) -> int:
    """
    Sieve limit large enough to hold p_{prime_index} and pi(value).

    Uses the inverse of the p_m < m*log(m*log m) bound with a safety factor,
    so callers never have to work out prime sizes by hand.
    """
    return max(2, value, safety * nth_prime_upper_bound(max(prime_index, 1)))


@dataclass(eq=False)
class PrimeTable:
    """
    Sieve-backed store of primes, prime counts and primorial prefix products.

    Primes are 1-indexed (p_1 = 2). The table is read-only after construction
    apart from the primorial checkpoints, which are filled lazily under a lock.
    """

    limit: int
    primes: np.ndarray
    pi_cumulative: np.ndarray
    _checkpoints: list[int] = field(default_factory=lambda: [1], repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def __getstate__(self):
        state = self.__dict__.copy()
        del state["_lock"]
        return state

    def __setstate__(self, state):
        self.__dict__.update(state)
        self._lock = threading.Lock()

    @property
    def prime_total(self) -> int:
        return int(self.primes.size)

    def covers_index(self, n: int) -> bool:
        return 1 <= n <= self.prime_total

    def require_index(self, n: int) -> None:
        if n < 1:
            raise DomainError(f"prime index must be >= 1, got {n}")
        if n > self.prime_total:
            raise TableRangeError(
                f"p_{n} is beyond the table (limit {self.limit} holds {self.prime_total} primes)",
                required_limit=required_sieve_limit(n),
            )

    def require_value(self, x: int) -> None:
        if x < 1:
            raise DomainError(f"prime_count needs x >= 1, got {x}")
        if x > self.limit:
            raise TableRangeError(
                f"pi({x}) is beyond the table limit {self.limit}",
                required_limit=2 * x,
            )

    def nth_prime(self, n: int) -> int:
        self.require_index(n)
        return int(self.primes[n - 1])

    def prime_count(self, x: int) -> int:
        self.require_value(x)
        return int(self.pi_cumulative[x])

    def primorial(self, n: int) -> int:
        """Exact product of the first n primes."""
        self.require_index(n)
        slot, rest = divmod(n, PRIMORIAL_STRIDE)
        self._extend_checkpoints(slot)
        value = self._checkpoints[slot]
        start = slot * PRIMORIAL_STRIDE
        for p in self.primes[start : start + rest].tolist():
            value *= p
        return value

    def _extend_checkpoints(self, slot: int) -> None:
        if slot < len(self._checkpoints):
            return
        with self._lock:
            while len(self._checkpoints) <= slot:
                index = len(self._checkpoints) - 1
                value = self._checkpoints[index]
                start = index * PRIMORIAL_STRIDE
                for p in self.primes[start : start + PRIMORIAL_STRIDE].tolist():
                    value *= p
                self._checkpoints.append(value)


def build_prime_table(
    limit: int, memory_budget_mib: int = DEFAULT_MEMORY_BUDGET_MIB
) -> PrimeTable:
    """
    Sieve all primes up to ``limit`` and tabulate pi(x) for every x <= limit.

    Args:
        limit (int): Inclusive sieve bound, at least 2.
        memory_budget_mib (int): Refuse limits whose tables would exceed this many MiB.

    Returns:
        PrimeTable: The immutable table.
    """
    if limit < 2:
        raise DomainError(f"sieve limit must be >= 2, got {limit}")
    needed = (limit + 1) * BYTES_PER_INTEGER
    if needed > memory_budget_mib * 1024 * 1024:
        raise ResourceError(
            f"sieve limit {limit} needs about {needed // (1024 * 1024)} MiB, "
            f"over the {memory_budget_mib} MiB budget"
        )

    flags = sieve_flags(limit)
    pi_cumulative = np.cumsum(flags, dtype=np.int32)
    primes = np.flatnonzero(flags).astype(np.int64)
    logger.debug(f"Sieved {primes.size} primes up to {limit}")
    return PrimeTable(limit=limit, primes=primes, pi_cumulative=pi_cumulative)


def nth_prime(table: PrimeTable, n: int) -> int:
    return table.nth_prime(n)


def prime_count(table: PrimeTable, x: int) -> int:
    return table.prime_count(x)


def primorial(table: PrimeTable, n: int) -> int:
    return table.primorial(n)
