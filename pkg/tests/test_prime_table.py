import math
import pickle

import numpy as np
import pytest
from sympy import primepi

from PrimeBound.base.prime_table import (
    PRIMORIAL_STRIDE,
    build_prime_table,
    nth_prime,
    nth_prime_upper_bound,
    prime_count,
    primorial,
    required_sieve_limit,
    sieve_flags,
)
from PrimeBound.errors import DomainError, ResourceError, TableRangeError

from .helpers import is_prime_by_trial_division, shared_table, trial_division_primes


@pytest.fixture(scope="module")
def table():
    return build_prime_table(2000)


def test_sieve_flags_small():
    flags = sieve_flags(30)
    assert np.flatnonzero(flags).tolist() == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


@pytest.mark.parametrize(
    "n, p",
    [(1, 2), (2, 3), (10, 29), (21, 73), (30, 113), (168, 997)],
)
def test_nth_prime(table, n, p):
    assert nth_prime(table, n) == p


@pytest.mark.parametrize(
    "x, count",
    [(1, 0), (2, 1), (10, 4), (20, 8), (113, 30), (1000, 168)],
)
def test_prime_count(table, x, count):
    assert prime_count(table, x) == count


def test_primorial_small(table):
    assert primorial(table, 1) == 2
    assert primorial(table, 4) == 210
    assert primorial(table, 10) == 6469693230


def test_primorial_across_checkpoints(table):
    primes = table.primes.tolist()
    for n in [PRIMORIAL_STRIDE - 1, PRIMORIAL_STRIDE, PRIMORIAL_STRIDE + 1, 300]:
        assert primorial(table, n) == math.prod(primes[:n])


def test_primorial_out_of_order_requests():
    table = build_prime_table(2000)
    # Later checkpoints first, then earlier ones.
    big = primorial(table, 290)
    small = primorial(table, 5)
    assert small == 2310
    assert big % small == 0


def test_index_beyond_table_carries_required_limit(table):
    with pytest.raises(TableRangeError) as info:
        table.nth_prime(table.prime_total + 1)
    assert info.value.required_limit is not None
    bigger = build_prime_table(info.value.required_limit)
    assert bigger.covers_index(table.prime_total + 1)


def test_value_beyond_table(table):
    with pytest.raises(TableRangeError):
        table.prime_count(table.limit + 1)


@pytest.mark.parametrize("n", [0, -3])
def test_bad_index(table, n):
    with pytest.raises(DomainError):
        table.nth_prime(n)


def test_limit_below_two():
    with pytest.raises(DomainError):
        build_prime_table(1)


def test_memory_budget_refused():
    with pytest.raises(ResourceError):
        build_prime_table(10**9, memory_budget_mib=1)


def test_required_sieve_limit_covers_index():
    for m in [1, 5, 6, 100, 5000]:
        limit = required_sieve_limit(m)
        assert build_prime_table(limit).covers_index(m)


def test_nth_prime_upper_bound_from_six():
    table = shared_table()
    for m in range(6, 2000):
        assert table.nth_prime(m) < nth_prime_upper_bound(m)


def test_table_pickles():
    table = build_prime_table(5000)
    primorial(table, 200)
    clone = pickle.loads(pickle.dumps(table))
    assert clone.prime_count(5000) == table.prime_count(5000)
    assert clone.primorial(400) == table.primorial(400)


def test_matches_trial_division_oracle():
    limit = 10**5
    table = build_prime_table(limit)
    oracle = trial_division_primes(limit)
    assert table.primes.tolist() == oracle
    # pi at every x, from the oracle's primes.
    expected = np.zeros(limit + 1, dtype=np.int64)
    expected[oracle] = 1
    assert np.array_equal(np.cumsum(expected), table.pi_cumulative.astype(np.int64))
    for n in [1, 2, 50, 500, len(oracle)]:
        assert table.primorial(n) == math.prod(oracle[:n])


def test_spot_check_primality():
    table = shared_table()
    for p in table.primes[-20:].tolist():
        assert is_prime_by_trial_division(p)


def test_prime_count_million_against_sympy():
    table = build_prime_table(10**6)
    assert table.prime_count(10**6) == 78498
    for x in [999_983, 500_000, 123_456]:
        assert table.prime_count(x) == int(primepi(x))
