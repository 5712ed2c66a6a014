"""Counting lattice points visible from the origin.

A point x in Z^m is visible when gcd(|x_1|, ..., |x_m|) = 1; the all-zero
tuple has gcd 0, so the origin is never visible.  The counting routes are:

  * enumeration oracles over the cube [-r, r]^m or the box [1, r]^m,
  * the telescoped first-difference assembly from Jordan totients,
  * the octant/orthant decomposition by coordinate signs,
  * the umbral polynomial route, which reduces the count to weighted
    Jordan summatory values.

All routes return identical exact integers; the test suite leans on that.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import accumulate, product
from math import comb, factorial, floor, gcd, isqrt
from typing import Callable, Mapping, Optional, Sequence, Union

from .arith import (
    CapacityError,
    JordanTable,
    MobiusTable,
    build_jordan_table,
    build_mobius_table,
    jordan_value,
    power_sum_polynomial,
)

# Default enumeration budget, in gcd evaluations.
DEFAULT_BUDGET = 10**9

# Beyond this radius the auto method choice switches from the sieve to the
# blocked summatory algorithm.
AUTO_SIEVE_LIMIT = 2_000_000


class BudgetError(Exception):
    """An enumeration request exceeds the configured point budget."""


class IntegralityError(RuntimeError):
    """An umbral evaluation failed to reduce to an integer (internal error)."""


@dataclass(frozen=True)
class CountQuery:
    """A counting request: dimension m >= 1, integer radius r >= 0."""

    dimension: int
    radius: int

    def __post_init__(self) -> None:
        if self.dimension < 1:
            raise ValueError(f"dimension must be >= 1, got {self.dimension}")
        if self.radius < 0:
            raise ValueError(f"radius must be >= 0, got {self.radius}")

    @classmethod
    def of(cls, dimension: int, radius: Union[int, float, Fraction, str]) -> "CountQuery":
        """Build a query, flooring a real radius: the count only changes at integers."""
        if not isinstance(radius, int):
            radius = floor(Fraction(radius))
        return cls(dimension, radius)


def _check_budget(points: int, budget: int) -> None:
    if points > budget:
        raise BudgetError(
            f"enumeration of {points} points exceeds the budget of {budget}; "
            "raise the budget or use a non-enumerative method"
        )


def brute_force_count(q: CountQuery, budget: int = DEFAULT_BUDGET) -> int:
    """Enumerate the full cube [-r, r]^m and count points with unit gcd."""
    m, r = q.dimension, q.radius
    _check_budget((2 * r + 1) ** m, budget)
    count = 0
    rng = range(-r, r + 1)
    for xs in product(rng, repeat=m):
        if gcd(*xs) == 1:
            count += 1
    return count


def brute_force_positive_count(q: CountQuery, budget: int = DEFAULT_BUDGET) -> int:
    """Enumerate the positive box [1, r]^m and count points with unit gcd."""
    m, r = q.dimension, q.radius
    if r == 0:
        return 0
    _check_budget(r**m, budget)
    count = 0
    for xs in product(range(1, r + 1), repeat=m):
        if gcd(*xs) == 1:
            count += 1
    return count


def visible_profile(m: int, r_max: int, budget: int = DEFAULT_BUDGET) -> list[int]:
    """Counts for every radius at once: profile[r] = count in [-r, r]^m.

    One pass over the nonnegative cone [0, r_max]^m, weighting each point by
    2^(number of nonzero coordinates) for its sign images and bucketing by
    Chebyshev norm.  gcd and the norm are invariant under sign flips, so
    this agrees with the full-cube enumeration (pinned by tests).
    """
    if m < 1 or r_max < 0:
        raise ValueError("need m >= 1 and r_max >= 0")
    _check_budget((r_max + 1) ** m, budget)
    bucket = [0] * (r_max + 1)
    for xs in product(range(r_max + 1), repeat=m):
        if gcd(*xs) == 1:
            bucket[max(xs)] += 1 << (m - xs.count(0))
    return list(accumulate(bucket))


def positive_profile(m: int, r_max: int, budget: int = DEFAULT_BUDGET) -> list[int]:
    """profile[r] = count in [1, r]^m, from one enumeration of [1, r_max]^m."""
    if m < 1 or r_max < 0:
        raise ValueError("need m >= 1 and r_max >= 0")
    _check_budget(max(r_max, 1) ** m, budget)
    bucket = [0] * (r_max + 1)
    for xs in product(range(1, r_max + 1), repeat=m):
        if gcd(*xs) == 1:
            bucket[max(xs)] += 1
    return list(accumulate(bucket))


def first_difference(m: int, n: int, tables: Optional[Sequence[JordanTable]] = None) -> int:
    """Increment of the positive-box count when the radius grows from n-1 to n.

    Inclusion-exclusion over the coordinates pinned to the new shell:
    sum_{j=0}^{m-1} (-1)^(m-1-j) C(m, j) J_j(n), valid for n >= 2.
    """
    if m < 1:
        raise ValueError(f"dimension must be >= 1, got {m}")
    if n < 2:
        raise ValueError(f"shell index must be >= 2, got {n}")
    if tables is not None:
        values = [tables[j].value(n) for j in range(m)]
    else:
        values = [jordan_value(j, n) for j in range(m)]
    return sum((-1) ** (m - 1 - j) * comb(m, j) * values[j] for j in range(m))


def positive_count_via_differences(m: int, r: int) -> int:
    """Telescoped positive-box count: 1 + sum of shell increments for n = 2..r."""
    if m < 1:
        raise ValueError(f"dimension must be >= 1, got {m}")
    if r < 0:
        raise ValueError(f"radius must be >= 0, got {r}")
    if r == 0:
        return 0
    mobius = build_mobius_table(r) if r >= 2 else None
    tables = [build_jordan_table(j, r, mobius) for j in range(m)] if r >= 2 else []
    total = 1
    for n in range(2, r + 1):
        total += first_difference(m, n, tables)
    return total


def count_via_orthants(
    m: int,
    r: int,
    positive: str = "brute",
    budget: int = DEFAULT_BUDGET,
) -> int:
    """Assemble the cube count from positive-box counts of dimensions <= m.

    Splitting by which coordinates are nonzero and their signs gives
    sum_{i=0}^{m-1} C(m, i) 2^(m-i) V+_{m-i}(r).  ``positive`` selects the
    positive-count source: "brute" enumerates, "diff" telescopes Jordan
    first differences.
    """
    if m < 1:
        raise ValueError(f"dimension must be >= 1, got {m}")
    if r < 0:
        raise ValueError(f"radius must be >= 0, got {r}")
    if r == 0:
        return 0
    if positive == "brute":
        pos: Callable[[int], int] = lambda d: brute_force_positive_count(
            CountQuery(d, r), budget
        )
    elif positive == "diff":
        pos = lambda d: positive_count_via_differences(d, r)
    else:
        raise ValueError(f"unknown positive-count source {positive!r}")
    return sum(comb(m, i) * 2 ** (m - i) * pos(m - i) for i in range(m))


# ---------------------------------------------------------------------------
# Jordan summatory values S_j(r) = J_j(1) + ... + J_j(r)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SummatoryCache:
    """Prefix sums of a Jordan table: prefix[r] = S_order(r), prefix[0] = 0."""

    order: int
    limit: int
    prefix: Sequence[int]

    def value(self, r: int) -> int:
        if not 0 <= r <= self.limit:
            raise ValueError(f"r={r} outside cache range 0..{self.limit}")
        return self.prefix[r]


def summatory_cache(j: int, limit: int, mobius: Optional[MobiusTable] = None) -> SummatoryCache:
    """Build S_j prefix sums for all radii up to limit via the Jordan sieve."""
    table = build_jordan_table(j, limit, mobius)
    prefix = [0]
    prefix.extend(accumulate(table.values[1:]))
    return SummatoryCache(j, limit, prefix)


class MertensCache:
    """Prefix sums of the Mobius function with divisor-block recursion.

    Arguments within the sieved range are table lookups; larger arguments
    use M(n) = 1 - sum_{d=2}^{n} M(n // d), grouped over blocks of equal
    n // d and memoized, so memory stays O(sqrt n) past the sieve.
    """

    def __init__(self, sieve_limit: int, mobius: Optional[MobiusTable] = None):
        if mobius is None or mobius.limit < sieve_limit:
            mobius = build_mobius_table(sieve_limit)
        self.sieve_limit = sieve_limit
        prefix = [0]
        prefix.extend(accumulate(mobius.values[1 : sieve_limit + 1]))
        self._prefix = prefix
        self._memo: dict[int, int] = {}

    def value(self, n: int) -> int:
        if n <= self.sieve_limit:
            return self._prefix[n]
        cached = self._memo.get(n)
        if cached is not None:
            return cached
        total = 1
        d = 2
        while d <= n:
            q = n // d
            d_hi = n // q
            total -= (d_hi - d + 1) * self.value(q)
            d = d_hi + 1
        self._memo[n] = total
        return total


def _summatory_sieve(j: int, r: int, mobius: Optional[MobiusTable]) -> int:
    table = build_jordan_table(j, r, mobius)
    return sum(table.values[1:])


def _summatory_mobius_faulhaber(j: int, r: int, mobius: Optional[MobiusTable]) -> int:
    # S_j(r) = sum_{d<=r} mu(d) * (1^j + 2^j + ... + floor(r/d)^j)
    if mobius is None or mobius.limit < r:
        mobius = build_mobius_table(r)
    poly = power_sum_polynomial(j + 1)
    total = 0
    mu = mobius.values
    for d in range(1, r + 1):
        if mu[d]:
            total += mu[d] * poly.evaluate(r // d)
    return total


def _summatory_blocked(j: int, r: int) -> int:
    # Same divisor sum, but d grouped into O(sqrt r) blocks of constant
    # floor(r/d); each block contributes a Mertens difference times one
    # power-sum evaluation.
    sieve_limit = max(1000, min(r, int(round(r ** (2 / 3)))))
    mertens = MertensCache(sieve_limit)
    poly = power_sum_polynomial(j + 1)
    total = 0
    d = 1
    while d <= r:
        q = r // d
        d_hi = r // q
        total += (mertens.value(d_hi) - mertens.value(d - 1)) * poly.evaluate(q)
        d = d_hi + 1
    return total


def jordan_summatory(
    j: int,
    r: int,
    method: str = "sieve",
    mobius: Optional[MobiusTable] = None,
) -> int:
    """S_j(r) by one of three interchangeable methods.

    "sieve" sums a sieved Jordan table (O(r) memory, guarded);
    "mobius_faulhaber" runs the divisor sum term by term over a Mobius
    table; "blocked" groups the divisor sum into floor-value blocks with
    Mertens prefix sums and needs only O(sqrt r) memory beyond its small
    sieve.  All three agree exactly.  A prebuilt ``mobius`` table is used
    when it suffices for the method; only its mu values are required.
    """
    if j < 0:
        raise ValueError(f"order must be >= 0, got {j}")
    if r < 0:
        raise ValueError(f"radius must be >= 0, got {r}")
    if r == 0:
        return 0
    if method == "sieve":
        return _summatory_sieve(j, r, mobius)
    if method == "mobius_faulhaber":
        return _summatory_mobius_faulhaber(j, r, mobius)
    if method == "blocked":
        return _summatory_blocked(j, r)
    raise ValueError(f"unknown summatory method {method!r}")


# ---------------------------------------------------------------------------
# The umbral polynomial route
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UmbralPolynomial:
    """Coefficients of Q_m(T) = ((2T+1)^(m+1) - (2T-1)^(m+1)) / (2(m+1)).

    ``coefficients[i]`` multiplies T^i for 0 <= i <= m+1.  The top
    coefficient is always 0 (the leading terms cancel) and c_m = 2^m;
    entries with m - i odd vanish by parity.
    """

    dimension: int
    coefficients: tuple[Fraction, ...]


def umbral_polynomial(m: int) -> UmbralPolynomial:
    """Exact coefficients of the counting polynomial for dimension m."""
    if m < 1:
        raise ValueError(f"dimension must be >= 1, got {m}")
    coeffs = []
    for i in range(m + 2):
        if (m - i) % 2 == 0:
            coeffs.append(Fraction(comb(m + 1, i) * 2**i, m + 1))
        else:
            coeffs.append(Fraction(0))
    return UmbralPolynomial(m, tuple(coeffs))


SummatorySource = Union[Mapping[int, SummatoryCache], Callable[[int, int], int]]


def _summatory_lookup(source: Optional[SummatorySource], order: int, r: int) -> int:
    if source is None:
        method = "sieve" if r <= AUTO_SIEVE_LIMIT else "blocked"
        return jordan_summatory(order, r, method)
    if callable(source):
        return source(order, r)
    return source[order].value(r)


def umbral_evaluate(
    poly: UmbralPolynomial,
    r: int,
    summatories: Optional[SummatorySource] = None,
) -> int:
    """Evaluate the counting polynomial under the umbral substitution.

    Each power T^i with i >= 1 is replaced by i * S_{i-1}(r) and the
    constant term by 0; the rational total must reduce to an integer, and a
    failure to do so is an internal error, never a rounding case.

    ``summatories`` may supply precomputed values: either a mapping from
    order to SummatoryCache or a callable (order, r) -> S_order(r).
    """
    if r < 0:
        raise ValueError(f"radius must be >= 0, got {r}")
    if r == 0:
        return 0
    total = Fraction(0)
    for i, c in enumerate(poly.coefficients):
        if i == 0 or not c:
            continue
        total += c * i * _summatory_lookup(summatories, i - 1, r)
    if total.denominator != 1:
        raise IntegralityError(
            f"umbral evaluation for m={poly.dimension}, r={r} gave non-integer {total}"
        )
    return int(total)


def visible_count(m: int, r: int, method: str = "umbral", budget: int = DEFAULT_BUDGET) -> int:
    """Count visible points in [-r, r]^m by the chosen route.

    Methods: "brute" (full-cube enumeration, budget-guarded), "umbral"
    (summatory evaluation; the scalable default), "orthant" (sign
    decomposition over enumerated positive boxes) and "diff" (sign
    decomposition over telescoped first differences).
    """
    if r == 0:
        return 0
    if method == "brute":
        return brute_force_count(CountQuery(m, r), budget)
    if method == "umbral":
        return umbral_evaluate(umbral_polynomial(m), r)
    if method == "orthant":
        return count_via_orthants(m, r, positive="brute", budget=budget)
    if method == "diff":
        return count_via_orthants(m, r, positive="diff")
    raise ValueError(f"unknown counting method {method!r}")


# ---------------------------------------------------------------------------
# Formal-series verification of the two generating-function displays
# ---------------------------------------------------------------------------
#
# Polynomials in the umbral symbol are coefficient tuples (index = power);
# series in u are lists of such polynomials (index = u-power).  Everything
# is an exact Fraction.

Poly = tuple[Fraction, ...]

_ZERO: Poly = (Fraction(0),)
_ONE: Poly = (Fraction(1),)


def _poly_trim(p: Sequence[Fraction]) -> Poly:
    last = 0
    for i, c in enumerate(p):
        if c:
            last = i
    return tuple(p[: last + 1])


def _poly_add(a: Poly, b: Poly) -> Poly:
    n = max(len(a), len(b))
    out = [Fraction(0)] * n
    for i, c in enumerate(a):
        out[i] += c
    for i, c in enumerate(b):
        out[i] += c
    return _poly_trim(out)


def _poly_scale(a: Poly, c: Fraction) -> Poly:
    if not c:
        return _ZERO
    return tuple(x * c for x in a)


def _poly_mul(a: Poly, b: Poly) -> Poly:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if not x:
            continue
        for k, y in enumerate(b):
            if y:
                out[i + k] += x * y
    return _poly_trim(out)


def _series_mul(F: list[Poly], G: list[Poly], order: int) -> list[Poly]:
    out: list[Poly] = [_ZERO] * (order + 1)
    for i, f in enumerate(F[: order + 1]):
        if f == _ZERO:
            continue
        for k, g in enumerate(G[: order + 1 - i]):
            if g != _ZERO:
                out[i + k] = _poly_add(out[i + k], _poly_mul(f, g))
    return out


def _series_reciprocal(F: list[Poly], order: int) -> list[Poly]:
    # F[0] must be the constant 1; R satisfies R*F = 1 term by term.
    if F[0] != _ONE:
        raise ValueError("series reciprocal needs unit constant term")
    R: list[Poly] = [_ONE]
    for n in range(1, order + 1):
        acc: Poly = _ZERO
        for k in range(1, n + 1):
            if k < len(F) and F[k] != _ZERO:
                acc = _poly_add(acc, _poly_mul(F[k], R[n - k]))
        R.append(_poly_scale(acc, Fraction(-1)))
    return R


def _series_log(F: list[Poly], order: int) -> list[Poly]:
    # L' * F = F' with L(0) = 0.
    if F[0] != _ONE:
        raise ValueError("series log needs unit constant term")
    L: list[Poly] = [_ZERO]
    for n in range(0, order):
        # (n+1) L_{n+1} = (n+1) F_{n+1} - sum_{j=0}^{n-1} (j+1) L_{j+1} F_{n-j}
        acc = _poly_scale(F[n + 1] if n + 1 < len(F) else _ZERO, Fraction(n + 1))
        for jj in range(n):
            f = F[n - jj] if n - jj < len(F) else _ZERO
            if f != _ZERO and L[jj + 1] != _ZERO:
                acc = _poly_add(acc, _poly_scale(_poly_mul(L[jj + 1], f), Fraction(-(jj + 1))))
        L.append(_poly_scale(acc, Fraction(1, n + 1)))
    return L


def _series_exp(G: list[Poly], order: int) -> list[Poly]:
    # E' = G' * E with E(0) = 1.
    if G[0] != _ZERO:
        raise ValueError("series exp needs zero constant term")
    E: list[Poly] = [_ONE]
    for n in range(0, order):
        acc: Poly = _ZERO
        for jj in range(n + 1):
            g = G[jj + 1] if jj + 1 < len(G) else _ZERO
            if g != _ZERO and E[n - jj] != _ZERO:
                acc = _poly_add(acc, _poly_scale(_poly_mul(g, E[n - jj]), Fraction(jj + 1)))
        E.append(_poly_scale(acc, Fraction(1, n + 1)))
    return E


def _umbral_substitute(p: Poly, caches: Mapping[int, SummatoryCache], r: int) -> Fraction:
    # X^i -> i * S_{i-1}(r) for i >= 1; the constant term maps to 0.
    total = Fraction(0)
    for i, c in enumerate(p):
        if i >= 1 and c:
            total += c * i * caches[i - 1].value(r)
    return total


def formal_series_failures(m_max: int, r: int) -> list[int]:
    """Dimensions m <= m_max where either generating-function display fails at r."""
    if m_max < 1 or r < 1:
        raise ValueError("need m_max >= 1 and r >= 1")
    order = m_max + 2
    mobius = build_mobius_table(r)
    caches = {j: summatory_cache(j, r, mobius) for j in range(m_max + 1)}

    # log form: (1/2) log((1 - (2X-1)u) / (1 - (2X+1)u)); coefficient of
    # u^(m+1) must substitute to the count.
    one_minus_lo: list[Poly] = [_ONE, (Fraction(1), Fraction(-2))] + [_ZERO] * (order - 1)
    one_minus_hi: list[Poly] = [_ONE, (Fraction(-1), Fraction(-2))] + [_ZERO] * (order - 1)
    ratio = _series_mul(one_minus_lo, _series_reciprocal(one_minus_hi, order), order)
    log_series = _series_log(ratio, order)

    # exponential form: (1/(2u)) (e^((2X+1)u) - e^((2X-1)u)); after the
    # shift, m! times the u^m coefficient must substitute to the count.
    arg_hi: list[Poly] = [_ZERO, (Fraction(1), Fraction(2))] + [_ZERO] * (order - 1)
    arg_lo: list[Poly] = [_ZERO, (Fraction(-1), Fraction(2))] + [_ZERO] * (order - 1)
    exp_hi = _series_exp(arg_hi, order)
    exp_lo = _series_exp(arg_lo, order)
    diff = [_poly_add(a, _poly_scale(b, Fraction(-1))) for a, b in zip(exp_hi, exp_lo)]
    if diff[0] != _ZERO:
        raise AssertionError("exponential difference must vanish at u^0")

    failures = []
    for m in range(1, m_max + 1):
        expected = umbral_evaluate(umbral_polynomial(m), r, caches)
        via_log = _umbral_substitute(_poly_scale(log_series[m + 1], Fraction(1, 2)), caches, r)
        via_exp = factorial(m) * _umbral_substitute(
            _poly_scale(diff[m + 1], Fraction(1, 2)), caches, r
        )
        if via_log != expected or via_exp != expected:
            failures.append(m)
    return failures


def formal_series_check(m_max: int, r: int) -> bool:
    """True iff both generating-function displays reproduce every count m <= m_max at r."""
    return not formal_series_failures(m_max, r)
