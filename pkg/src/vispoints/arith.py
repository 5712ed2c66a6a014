"""Exact foundational arithmetic: Mobius sieve, Jordan totients, Bernoulli
numbers, and power-sum (Faulhaber) polynomials.

Everything in this module is exact: integers are arbitrary-precision Python
ints and rationals are fractions.Fraction.  No operation here produces a
float.  Tables are immutable after construction and safe to share between
threads.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, lcm
from typing import BinaryIO, Optional, Sequence

# Hard cap on sieve allocations.  Requests beyond this must go through the
# blocked summatory algorithm, which needs only O(sqrt r) memory.
TABLE_GUARD = 2**31

MOBIUS_CACHE_MAGIC = b"VPMU1\x00"


class CapacityError(Exception):
    """A table request exceeds the configured memory guard."""


def _check_limit(limit: int) -> None:
    if limit < 1:
        raise ValueError(f"table limit must be >= 1, got {limit}")
    if limit > TABLE_GUARD:
        raise CapacityError(
            f"table limit {limit} exceeds the guard of {TABLE_GUARD} entries; "
            "use the blocked summatory algorithm instead"
        )


@dataclass(frozen=True)
class MobiusTable:
    """Sieved values of the Mobius function mu(n) for 1 <= n <= limit.

    ``values[n]`` is mu(n); index 0 is an unused sentinel.  When the table
    was built by the sieve, ``smallest_prime_factor[n]`` holds the least
    prime factor of n (n >= 2).  Tables loaded from a binary cache carry
    values only and have ``smallest_prime_factor = None``.
    """

    limit: int
    values: Sequence[int]
    smallest_prime_factor: Optional[Sequence[int]] = None

    def mu(self, n: int) -> int:
        if not 1 <= n <= self.limit:
            raise ValueError(f"n={n} outside table range 1..{self.limit}")
        return self.values[n]

    def spf(self, n: int) -> int:
        if self.smallest_prime_factor is None:
            raise ValueError("table has no factor data (loaded from cache)")
        if not 2 <= n <= self.limit:
            raise ValueError(f"n={n} outside factor range 2..{self.limit}")
        return self.smallest_prime_factor[n]


def build_mobius_table(limit: int) -> MobiusTable:
    """Linear sieve for mu(n), n <= limit, keeping the smallest-prime-factor
    array as a byproduct (Jordan tables reuse it)."""
    _check_limit(limit)
    mu = [0] * (limit + 1)
    mu[1] = 1
    spf = [0] * (limit + 1)
    primes: list[int] = []
    for i in range(2, limit + 1):
        if spf[i] == 0:
            spf[i] = i
            primes.append(i)
            mu[i] = -1
        si = spf[i]
        for p in primes:
            ip = i * p
            if p > si or ip > limit:
                break
            spf[ip] = p
            mu[ip] = 0 if p == si else -mu[i]
    return MobiusTable(limit, mu, spf)


def save_mobius_cache(table: MobiusTable, fh: BinaryIO) -> None:
    """Binary cache: magic, little-endian u64 limit, then mu(n)+1 per byte."""
    fh.write(MOBIUS_CACHE_MAGIC)
    fh.write(struct.pack("<Q", table.limit))
    fh.write(bytes(table.values[n] + 1 for n in range(1, table.limit + 1)))


def load_mobius_cache(fh: BinaryIO) -> MobiusTable:
    """Read a cache written by save_mobius_cache, validating magic and length."""
    magic = fh.read(len(MOBIUS_CACHE_MAGIC))
    if magic != MOBIUS_CACHE_MAGIC:
        raise ValueError(f"bad sieve cache magic {magic!r}")
    header = fh.read(8)
    if len(header) != 8:
        raise ValueError("truncated sieve cache header")
    (limit,) = struct.unpack("<Q", header)
    _check_limit(limit)
    payload = fh.read()
    if len(payload) != limit:
        raise ValueError(
            f"sieve cache length mismatch: expected {limit} value bytes, got {len(payload)}"
        )
    values = [0] * (limit + 1)
    for n, byte in enumerate(payload, start=1):
        if byte > 2:
            raise ValueError(f"sieve cache byte {byte} at n={n} is not mu+1")
        values[n] = byte - 1
    return MobiusTable(limit, values, None)


def factorize(n: int) -> list[tuple[int, int]]:
    """Prime factorization of n >= 1 by trial division, as (prime, exponent)."""
    if n < 1:
        raise ValueError(f"cannot factorize {n}")
    out = []
    for p in (2, 3):
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
    # remaining factors are coprime to 6; step through 6k +/- 1
    d = 5
    while d * d <= n:
        for q in (d, d + 2):
            if n % q == 0:
                e = 0
                while n % q == 0:
                    n //= q
                    e += 1
                out.append((q, e))
        d += 6
    if n > 1:
        out.append((n, 1))
    return out


def divisors(n: int) -> list[int]:
    """All positive divisors of n, ascending."""
    out = [1]
    for p, e in factorize(n):
        out = [d * p**k for d in out for k in range(e + 1)]
    return sorted(out)


def jordan_value(j: int, n: int) -> int:
    """J_j(n): the number of j-tuples in [1,n]^j whose gcd with n is 1.

    Computed as n^j * prod_{p|n} (1 - p^-j) over the prime factorization.
    The order-0 function is the indicator of n == 1; the product form does
    not cover it (its empty-product convention only handles n = 1), so it
    is a separate branch.
    """
    if j < 0:
        raise ValueError(f"order must be >= 0, got {j}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if j == 0:
        return 1 if n == 1 else 0
    result = 1
    for p, e in factorize(n):
        pj = p**j
        result *= (pj - 1) * pj ** (e - 1)
    return result


@dataclass(frozen=True)
class JordanTable:
    """J_j(n) for 1 <= n <= limit; ``values[n]`` = J_j(n), index 0 unused."""

    order: int
    limit: int
    values: Sequence[int]

    def value(self, n: int) -> int:
        if not 1 <= n <= self.limit:
            raise ValueError(f"n={n} outside table range 1..{self.limit}")
        return self.values[n]


def build_jordan_table(j: int, limit: int, mobius: Optional[MobiusTable] = None) -> JordanTable:
    """Sieve J_j(n) for n <= limit from the smallest-prime-factor array.

    Uses the multiplicative recurrence J_j(p*m) = J_j(m) * p^j when p | m
    and J_j(m) * (p^j - 1) otherwise, where p is the least prime of p*m.
    """
    if j < 0:
        raise ValueError(f"order must be >= 0, got {j}")
    _check_limit(limit)
    if mobius is None or mobius.smallest_prime_factor is None or mobius.limit < limit:
        mobius = build_mobius_table(limit)
    spf = mobius.smallest_prime_factor
    assert spf is not None
    values = [0] * (limit + 1)
    values[1] = 1
    pow_cache: dict[int, int] = {}
    for i in range(2, limit + 1):
        p = spf[i]
        pj = pow_cache.get(p)
        if pj is None:
            pj = p**j
            pow_cache[p] = pj
        m = i // p
        values[i] = values[m] * (pj if m % p == 0 else pj - 1)
    return JordanTable(j, limit, values)


def divisor_sum_check(j: int, n: int) -> bool:
    """True iff sum of J_j(d) over divisors d of n equals n^j exactly."""
    total = sum(jordan_value(j, d) for d in divisors(n))
    return total == n**j


@dataclass(frozen=True)
class BernoulliSequence:
    """B_0..B_K as exact rationals, under the convention B_1 = +1/2."""

    values: tuple[Fraction, ...]

    def b(self, k: int) -> Fraction:
        return self.values[k]

    def __len__(self) -> int:
        return len(self.values)


@lru_cache(maxsize=None)
def _bernoulli_values(count: int) -> tuple[Fraction, ...]:
    # Recurrence pinned by the power-sum identity at n = 1:
    #   sum_{j=0}^{i-1} C(i,j) B_j = i  for every i >= 1,
    # which forces B_1 = +1/2.
    values: list[Fraction] = []
    for i in range(1, count + 1):
        acc = Fraction(0)
        for jj in range(i - 1):
            acc += comb(i, jj) * values[jj]
        values.append(Fraction(i - acc, i))
    return tuple(values)


def bernoulli(K: int) -> BernoulliSequence:
    """Bernoulli numbers B_0..B_K with B_1 = +1/2."""
    if K < 0:
        raise ValueError(f"K must be >= 0, got {K}")
    return BernoulliSequence(_bernoulli_values(K + 1))


@dataclass(frozen=True)
class PowerSumPolynomial:
    """Closed form for 1^(i-1) + 2^(i-1) + ... + n^(i-1) as a polynomial in n.

    ``coefficients[k]`` multiplies n^k.  ``scaled`` holds the coefficients
    times ``common_denominator`` for integer Horner evaluation.
    """

    exponent: int
    coefficients: tuple[Fraction, ...]
    scaled: tuple[int, ...]
    common_denominator: int

    def evaluate(self, n: int) -> int:
        if n < 0:
            raise ValueError(f"n must be >= 0, got {n}")
        acc = 0
        for a in reversed(self.scaled):
            acc = acc * n + a
        q, rem = divmod(acc, self.common_denominator)
        if rem:
            raise ArithmeticError(
                f"power-sum polynomial i={self.exponent} gave non-integer at n={n}"
            )
        return q


@lru_cache(maxsize=None)
def power_sum_polynomial(i: int) -> PowerSumPolynomial:
    """Polynomial P_i with P_i(n) = sum_{q<=n} q^(i-1), exact rational coefficients."""
    if i < 1:
        raise ValueError(f"exponent must be >= 1, got {i}")
    seq = bernoulli(i - 1)
    coeffs = [Fraction(0)] * (i + 1)
    for j in range(i):
        # term C(i,j) B_j n^(i-j) / i
        coeffs[i - j] += Fraction(comb(i, j), i) * seq.b(j)
    den = 1
    for c in coeffs:
        den = lcm(den, c.denominator)
    scaled = tuple(int(c * den) for c in coeffs)
    return PowerSumPolynomial(i, tuple(coeffs), scaled, den)


def power_sum(i: int, n: int) -> int:
    """Exact 1^(i-1) + 2^(i-1) + ... + n^(i-1) via the closed-form polynomial."""
    return power_sum_polynomial(i).evaluate(n)
