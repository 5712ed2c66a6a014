from __future__ import annotations

import io
from fractions import Fraction
from math import comb, prod

import pytest
from hypothesis import given, settings, strategies as st

from vispoints.arith import (
    CapacityError,
    TABLE_GUARD,
    bernoulli,
    build_jordan_table,
    build_mobius_table,
    divisor_sum_check,
    divisors,
    factorize,
    jordan_value,
    load_mobius_cache,
    power_sum,
    power_sum_polynomial,
    save_mobius_cache,
)


def mobius_by_factorization(n: int) -> int:
    if n == 1:
        return 1
    factors = factorize(n)
    if any(e > 1 for _, e in factors):
        return 0
    return -1 if len(factors) % 2 else 1


def totient_sieve(limit: int) -> list[int]:
    # Independent classic phi sieve, kept separate from the Jordan route.
    phi = list(range(limit + 1))
    for p in range(2, limit + 1):
        if phi[p] == p:  # p prime
            for multiple in range(p, limit + 1, p):
                phi[multiple] -= phi[multiple] // p
    return phi


def test_mobius_sieve_matches_factorization_oracle():
    table = build_mobius_table(100_000)
    for n in range(1, 100_001, 17):
        assert table.mu(n) == mobius_by_factorization(n)
    for n in range(1, 2000):
        assert table.mu(n) == mobius_by_factorization(n)


def test_smallest_prime_factor():
    table = build_mobius_table(5000)
    for n in range(2, 5001):
        assert table.spf(n) == factorize(n)[0][0]


def test_mobius_table_range_checks():
    table = build_mobius_table(10)
    with pytest.raises(ValueError):
        table.mu(0)
    with pytest.raises(ValueError):
        table.mu(11)
    with pytest.raises(ValueError):
        build_mobius_table(0)
    with pytest.raises(CapacityError):
        build_mobius_table(TABLE_GUARD + 1)


def test_factorize_and_divisors():
    assert factorize(1) == []
    assert factorize(2**5) == [(2, 5)]
    assert factorize(360) == [(2, 3), (3, 2), (5, 1)]
    assert factorize(97) == [(97, 1)]
    assert divisors(1) == [1]
    assert divisors(12) == [1, 2, 3, 4, 6, 12]
    for n in (2, 60, 97, 144):
        assert prod(p**e for p, e in factorize(n)) == n


def test_jordan_value_small_cases():
    # J_1 is the Euler totient.
    assert [jordan_value(1, n) for n in range(1, 11)] == [1, 1, 2, 2, 4, 2, 6, 4, 6, 4]
    assert jordan_value(2, 4) == 12
    assert jordan_value(2, 6) == 24
    # Order 0 picks out n = 1 and nothing else.
    assert jordan_value(0, 1) == 1
    assert all(jordan_value(0, n) == 0 for n in range(2, 50))


def test_jordan_table_matches_pointwise_formula():
    for j in range(0, 5):
        table = build_jordan_table(j, 400)
        for n in range(1, 401):
            assert table.value(n) == jordan_value(j, n)


def test_jordan_order_one_matches_totient_sieve():
    phi = totient_sieve(10_000)
    table = build_jordan_table(1, 10_000)
    assert list(table.values[1:]) == phi[1:]


def test_divisor_sums_recover_powers():
    for j in range(0, 6):
        for n in (1, 2, 12, 97, 360, 1024, 1999):
            assert divisor_sum_check(j, n)


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=4), st.integers(min_value=1, max_value=3000))
def test_divisor_sum_property(j, n):
    assert sum(jordan_value(j, d) for d in divisors(n)) == n**j


def test_bernoulli_values():
    seq = bernoulli(12)
    expected = {
        0: Fraction(1),
        1: Fraction(1, 2),
        2: Fraction(1, 6),
        4: Fraction(-1, 30),
        6: Fraction(1, 42),
        8: Fraction(-1, 30),
        10: Fraction(5, 66),
        12: Fraction(-691, 2730),
    }
    for k, value in expected.items():
        assert seq.b(k) == value
    assert all(seq.b(k) == 0 for k in (3, 5, 7, 9, 11))


def test_bernoulli_recurrence_identity():
    # sum_{j<i} C(i,j) B_j = i pins the B_1 = +1/2 convention.
    seq = bernoulli(20)
    for i in range(1, 21):
        assert sum(comb(i, j) * seq.b(j) for j in range(i)) == i


def test_power_sum_against_direct_summation():
    for i in range(1, 9):
        for n in (0, 1, 2, 7, 50, 199):
            assert power_sum(i, n) == sum(q ** (i - 1) for q in range(1, n + 1))


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=1, max_value=10), st.integers(min_value=0, max_value=400))
def test_power_sum_property(i, n):
    assert power_sum(i, n) == sum(q ** (i - 1) for q in range(1, n + 1))


def test_power_sum_polynomial_is_integer_valued():
    poly = power_sum_polynomial(5)
    assert isinstance(poly.evaluate(123), int)


def test_mobius_cache_round_trip():
    table = build_mobius_table(1000)
    buffer = io.BytesIO()
    save_mobius_cache(table, buffer)
    buffer.seek(0)
    loaded = load_mobius_cache(buffer)
    assert loaded.limit == table.limit
    assert list(loaded.values) == list(table.values)


@pytest.mark.parametrize(
    "payload",
    [
        b"",
        b"WRONG!\x00\x00\x00\x00\x00\x00\x00\x00\x00\x00",
        b"VPMU1\x00\x05\x00",  # truncated length header
        b"VPMU1\x00" + (5).to_bytes(8, "little") + b"\x00\x01\x02",  # short payload
        b"VPMU1\x00" + (2).to_bytes(8, "little") + b"\x00\x01\x07",  # byte out of range
    ],
)
def test_mobius_cache_rejects_corrupt_input(payload):
    with pytest.raises(ValueError):
        load_mobius_cache(io.BytesIO(payload))
