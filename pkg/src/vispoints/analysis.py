"""Error-term analysis for visible-point counts.

Combines the exact counting routes with certified interval arithmetic:
the main term 2^m r^m / zeta(m), the error E_m(r) = V_m(r) - main term,
exact fractional-part Mobius sums, a machine-checked certificate that the
witness construction forces those sums below -1/20, and deterministic
scan tables for CSV export.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence, TextIO, TypeVar

from .arith import build_mobius_table, factorize
from .intervals import IntervalReal, zeta_interval
from .visibility import (
    SummatoryCache,
    summatory_cache,
    umbral_evaluate,
    umbral_polynomial,
)

_T = TypeVar("_T")
_U = TypeVar("_U")

ERROR_CSV_HEADER = "m,r,V,main_mid,E_mid,E_norm_lo,E_norm_hi"


def _tree_sum(values: Sequence[Fraction]) -> Fraction:
    # Pairwise folding keeps intermediate denominators near the subproblem
    # lcm instead of the full one, which matters for 10^4-term sums.
    items = list(values)
    if not items:
        return Fraction(0)
    while len(items) > 1:
        folded = [items[i] + items[i + 1] for i in range(0, len(items) - 1, 2)]
        if len(items) % 2:
            folded.append(items[-1])
        items = folded
    return items[0]


def _map_ordered(fn: Callable[[_T], _U], items: Iterable[_T], threads: int) -> list[_U]:
    # Executor.map preserves input order, so results are independent of
    # the worker count; that is what makes scan output deterministic.
    work = list(items)
    if threads <= 1 or len(work) <= 1:
        return [fn(x) for x in work]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, work))


def decimal_str(value: Fraction) -> str:
    """Decimal rendering with 12 significant digits (midpoints in CSV)."""
    return f"{float(value):.12g}"


def format_rational(value: Fraction) -> str:
    """Exact "p/q" rendering used in JSON and CSV bound columns."""
    return f"{value.numerator}/{value.denominator}"


# ---------------------------------------------------------------------------
# Main term and error term
# ---------------------------------------------------------------------------


def default_precision_bits(m: int, r: int) -> int:
    """Working precision that keeps main-term error far below r^(m-1)."""
    return m * (r + 2).bit_length() + 64


def main_term(m: int, r: int, precision_bits: Optional[int] = None) -> IntervalReal:
    """Enclosure of 2^m r^m / zeta(m); width below 10^-6 r^(m-1).

    Precision is raised automatically until the width target holds, so the
    returned sign and leading digits are always certified.
    """
    if m < 2:
        raise ValueError(f"main term needs m >= 2 (zeta pole at 1), got {m}")
    if r < 0:
        raise ValueError(f"radius must be >= 0, got {r}")
    if r == 0:
        return IntervalReal.point(0)
    bits = precision_bits if precision_bits is not None else default_precision_bits(m, r)
    bits = max(bits, m + 80)
    target = Fraction(r ** (m - 1), 10**6)
    while True:
        enclosure = ((2 * r) ** m / zeta_interval(m, bits)).round_outward(bits)
        if enclosure.width() < target:
            return enclosure
        bits *= 2


def error_term(
    m: int,
    r: int,
    precision_bits: Optional[int] = None,
    summatories=None,
) -> IntervalReal:
    """Enclosure of E_m(r) = V_m(r) - 2^m r^m / zeta(m).

    The count is exact, so the width equals the main term's and stays
    below 10^-6 r^(m-1); whenever 0 is outside the interval the sign of
    the error is certified.
    """
    if m < 2:
        raise ValueError(f"error term needs m >= 2, got {m}")
    if r < 1:
        raise ValueError(f"radius must be >= 1, got {r}")
    count = umbral_evaluate(umbral_polynomial(m), r, summatories)
    return count - main_term(m, r, precision_bits)


# ---------------------------------------------------------------------------
# Fractional-part Mobius sums
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FractionalMobiusSum:
    """Exact value of sum_{d<=r} mu(d)/d^m {r/d}^k with {x} = x - floor x."""

    m: int
    k: int
    r: int
    value: Fraction


def fractional_mobius_sum(m: int, k: int, r: int) -> FractionalMobiusSum:
    """Evaluate the sum exactly; |value| <= sum_{d<=r} d^-m always.

    {r/d} = (r mod d)/d, so a divisor d of r contributes nothing; in
    particular d = 1 never contributes and the sum at r = 1 is 0.
    """
    if m < 1:
        raise ValueError(f"exponent must be >= 1, got {m}")
    if k < 1:
        raise ValueError(f"fractional-part power must be >= 1, got {k}")
    if r < 1:
        raise ValueError(f"radius must be >= 1, got {r}")
    mobius = build_mobius_table(r)
    mu = mobius.values
    terms = []
    for d in range(2, r + 1):
        rem = r % d
        if mu[d] and rem:
            terms.append(Fraction(mu[d] * rem**k, d ** (m + k)))
    return FractionalMobiusSum(m, k, r, _tree_sum(terms))


def mobius_zeta_partial(i: int, r: int) -> Fraction:
    """Exact sum_{d<=r} mu(d)/d^i, the truncation of 1/zeta(i).

    Deviation from 1/zeta(i) is at most r^(1-i)/(i-1): the dropped terms
    are bounded by the integral of x^-i past r.
    """
    if i < 2:
        raise ValueError(f"exponent must be >= 2, got {i}")
    if r < 1:
        raise ValueError(f"radius must be >= 1, got {r}")
    mobius = build_mobius_table(r)
    mu = mobius.values
    return _tree_sum(
        [Fraction(mu[d], d**i) for d in range(1, r + 1) if mu[d]]
    )


# ---------------------------------------------------------------------------
# The witness-bound certificate
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WitnessBoundCertificate:
    """Certified upper bound on the fractional Mobius sum at witness radii.

    For r odd and divisible by every odd prime up to the cutoff, each odd
    squarefree d <= cutoff divides r ({r/d} = 0) and each even squarefree
    d <= cutoff gives {r/d} = 1/2.  The head is therefore the exact
    k-independent rational (1/2) sum over even squarefree d <= cutoff of
    mu(d)/d^m; everything beyond the cutoff is absorbed into tail_bound.

    ``terms`` lists (d, contribution) for the head; ``head_extra`` is the
    head without its dominant d = 2 term, i.e. head + 1/2^(m+1).
    ``passes`` certifies sum < -1/20 for every admissible witness radius.
    """

    m: int
    cutoff: int
    terms: tuple[tuple[int, Fraction], ...]
    head: Fraction
    head_extra: Fraction
    tail_bound: Fraction
    upper: Fraction
    passes: bool

    def to_json_dict(self) -> dict:
        return {
            "m": self.m,
            "cutoff": self.cutoff,
            "head": format_rational(self.head),
            "head_extra": format_rational(self.head_extra),
            "tail_bound": format_rational(self.tail_bound),
            "upper": format_rational(self.upper),
            "passes": self.passes,
        }


def certify_witness_bound(m: int, cutoff: int = 100) -> WitnessBoundCertificate:
    """Build the head/tail certificate for dimension m in {2, 3}.

    tail_bound is the integral bound cutoff^(1-m)/(m-1), which implies the
    cruder cutoff^(1-m).  Dimensions >= 4 go through
    large_m_negativity_check instead.
    """
    if m not in (2, 3):
        raise ValueError(f"certificate applies to m in {{2, 3}}, got {m}")
    if cutoff < 6:
        raise ValueError(f"cutoff must be >= 6, got {cutoff}")
    mobius = build_mobius_table(cutoff)
    terms = []
    for d in range(2, cutoff + 1, 2):
        mu = mobius.mu(d)
        if mu:
            terms.append((d, Fraction(mu, 2 * d**m)))
    head = sum(c for _, c in terms)
    head_extra = head + Fraction(1, 2 ** (m + 1))
    tail_bound = Fraction(1, (m - 1) * cutoff ** (m - 1))
    upper = head + tail_bound
    return WitnessBoundCertificate(
        m=m,
        cutoff=cutoff,
        terms=tuple(terms),
        head=head,
        head_extra=head_extra,
        tail_bound=tail_bound,
        upper=upper,
        passes=upper < Fraction(-1, 20),
    )


# ---------------------------------------------------------------------------
# Negativity scan for dimensions >= 4
# ---------------------------------------------------------------------------

# Head cutoff for the fast negativity certificate; past it the tail is
# bounded by an integral and the d = 2 term already dominates.
_NEGATIVITY_HEAD_CUTOFF = 64


def zeta_gap_ok(m: int, precision_bits: Optional[int] = None) -> bool:
    """Certified check that zeta(m) - 1 - 2^-m < 2^-(m+1)."""
    if m < 4:
        raise ValueError(f"gap check applies for m >= 4, got {m}")
    bits = precision_bits if precision_bits is not None else m + 64
    gap = zeta_interval(m, bits) - 1 - Fraction(1, 2**m)
    return gap.hi < Fraction(1, 2 ** (m + 1))


def _fractional_sum_is_negative(m: int, r: int, mobius) -> bool:
    # Exact decision for odd r.  Head over d <= cutoff is exact; the rest
    # is within +-cutoff^(1-m)/(m-1).  Only an inconclusive bracket falls
    # back to the full exact sum, which near-never happens since the d = 2
    # term contributes -1/2^(m+1).
    cutoff = min(r, _NEGATIVITY_HEAD_CUTOFF)
    mu = mobius.values
    terms = []
    for d in range(2, cutoff + 1):
        rem = r % d
        if mu[d] and rem:
            terms.append(Fraction(mu[d] * rem, d ** (m + 1)))
    head = _tree_sum(terms)
    if r <= _NEGATIVITY_HEAD_CUTOFF:
        return head < 0
    tail = Fraction(1, (m - 1) * cutoff ** (m - 1))
    if head + tail < 0:
        return True
    if head - tail >= 0:
        return False
    return fractional_mobius_sum(m, 1, r).value < 0


def negativity_failures(m: int, r_max: int, stop_early: bool = True) -> list[int]:
    """Odd radii in [3, r_max] whose fractional Mobius sum is not negative."""
    if m < 4:
        raise ValueError(f"negativity scan applies for m >= 4, got {m}")
    if r_max < 3:
        raise ValueError(f"r_max must be >= 3, got {r_max}")
    mobius = build_mobius_table(min(r_max, _NEGATIVITY_HEAD_CUTOFF))
    failures = []
    for r in range(3, r_max + 1, 2):
        if not _fractional_sum_is_negative(m, r, mobius):
            failures.append(r)
            if stop_early:
                break
    return failures


def large_m_negativity_check(m: int, r_max: int) -> bool:
    """Dimension >= 4 branch: zeta gap plus exhaustive odd-radius scan.

    True iff zeta(m) - 1 - 2^-m < 2^-(m+1) is certified and the
    fractional Mobius sum with k = 1 is negative for every odd r in
    [3, r_max]; stops at the first counterexample (none is expected).
    """
    return zeta_gap_ok(m) and not negativity_failures(m, r_max)


# ---------------------------------------------------------------------------
# Witness scan
# ---------------------------------------------------------------------------


# Output rounding for normalized enclosures: keeps CSV/report bound fields
# dyadic and short while widening by only 2^-95.
_NORM_BITS = 96


@dataclass(frozen=True)
class WitnessRow:
    m: int
    r: int
    k: int
    primes: tuple[int, ...]
    s_value: Fraction
    s_decimal: str
    count: int
    error: IntervalReal
    normalized: IntervalReal


@dataclass(frozen=True)
class WitnessReport:
    m: int
    primes: tuple[int, ...]
    cap: int
    rows: tuple[WitnessRow, ...]
    skipped: tuple[tuple[int, int], ...]  # (k, r) pairs over the cap


def _is_odd_prime(p: int) -> bool:
    return p >= 3 and p % 2 == 1 and factorize(p) == [(p, 1)]


def witness_scan(
    m: int,
    prime_set: Iterable[int],
    k_values: Iterable[int],
    r_cap: int,
    threads: int = 1,
) -> WitnessReport:
    """Evaluate the witness family r = k * product(prime_set).

    Each prime must be an odd prime and each k odd and coprime to the
    set, so every odd squarefree divisor structure the certificate relies
    on is present.  Radii over r_cap are skipped and recorded.  Rows are
    sorted by r and carry the exact fractional sum S, the exact count,
    and enclosures of the error and of error / r^(m-1).
    """
    if m < 2:
        raise ValueError(f"witness scan needs m >= 2, got {m}")
    if r_cap < 1:
        raise ValueError(f"r_cap must be >= 1, got {r_cap}")
    primes = tuple(sorted(set(prime_set)))
    if not primes:
        raise ValueError("prime set must be nonempty")
    for p in primes:
        if not _is_odd_prime(p):
            raise ValueError(f"{p} is not an odd prime")
    base = 1
    for p in primes:
        base *= p
    kept, skipped = [], []
    for k in sorted(set(k_values)):
        if k < 1 or k % 2 == 0:
            raise ValueError(f"k must be odd and >= 1, got {k}")
        if any(k % p == 0 for p in primes):
            raise ValueError(f"k = {k} shares a factor with the prime set")
        r = k * base
        (kept if r <= r_cap else skipped).append((k, r))

    def build_row(pair: tuple[int, int]) -> WitnessRow:
        k, r = pair
        s = fractional_mobius_sum(m, 1, r).value
        err = error_term(m, r)
        return WitnessRow(
            m=m,
            r=r,
            k=k,
            primes=primes,
            s_value=s,
            s_decimal=decimal_str(s),
            count=umbral_evaluate(umbral_polynomial(m), r),
            error=err,
            normalized=(err / r ** (m - 1)).round_outward(_NORM_BITS),
        )

    rows = _map_ordered(build_row, sorted(kept, key=lambda kr: kr[1]), threads)
    return WitnessReport(
        m=m,
        primes=primes,
        cap=r_cap,
        rows=tuple(rows),
        skipped=tuple((k, r) for k, r in skipped),
    )


# ---------------------------------------------------------------------------
# Error scan and CSV export
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ErrorScanRow:
    m: int
    r: int
    count: int
    main_mid: Fraction
    error_mid: Fraction
    normalized: IntervalReal


def error_scan(
    m: int,
    r_from: int,
    r_to: int,
    step: int = 1,
    threads: int = 1,
) -> list[ErrorScanRow]:
    """Rows (r, V, main midpoint, E midpoint, E/r^(m-1) enclosure).

    One sieve pass supplies every count; one zeta enclosure at the
    precision of the largest radius serves the whole range, so rows are
    cheap and the output is deterministic.
    """
    if m < 2:
        raise ValueError(f"error scan needs m >= 2, got {m}")
    if not 1 <= r_from <= r_to:
        raise ValueError(f"need 1 <= r_from <= r_to, got {r_from}..{r_to}")
    if step < 1:
        raise ValueError(f"step must be >= 1, got {step}")
    mobius = build_mobius_table(r_to)
    caches = {j: summatory_cache(j, r_to, mobius) for j in range(m)}
    poly = umbral_polynomial(m)
    bits = max(default_precision_bits(m, r_to), m + 80)
    inverse_zeta = (1 / zeta_interval(m, bits)).round_outward(bits)
    width_cap = Fraction(1, 10**6)  # per-row target is width_cap * r^(m-1)
    while (2**m) * inverse_zeta.width() >= width_cap:
        bits *= 2
        inverse_zeta = (1 / zeta_interval(m, bits)).round_outward(bits)

    def build_row(r: int) -> ErrorScanRow:
        count = umbral_evaluate(poly, r, caches)
        main = (2 * r) ** m * inverse_zeta
        err = count - main
        return ErrorScanRow(
            m=m,
            r=r,
            count=count,
            main_mid=main.mid(),
            error_mid=err.mid(),
            normalized=(err / r ** (m - 1)).round_outward(_NORM_BITS),
        )

    return _map_ordered(build_row, range(r_from, r_to + 1, step), threads)


def write_error_csv(rows: Iterable[ErrorScanRow], fh: TextIO) -> None:
    """Emit the scan schema: exact ints, 12-digit midpoints, exact bounds."""
    fh.write(ERROR_CSV_HEADER + "\n")
    for row in rows:
        fields = (
            str(row.m),
            str(row.r),
            str(row.count),
            decimal_str(row.main_mid),
            decimal_str(row.error_mid),
            format_rational(row.normalized.lo),
            format_rational(row.normalized.hi),
        )
        fh.write(",".join(fields) + "\n")
