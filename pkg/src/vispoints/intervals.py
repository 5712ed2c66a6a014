"""Certified real arithmetic on intervals with exact rational endpoints.

An IntervalReal is a pair of Fractions [lo, hi] guaranteed to contain the
real number being tracked.  Field operations on exact endpoints are sound
with no rounding analysis; denominators are kept in check by explicit
outward dyadic rounding.  On top of the arithmetic sit enclosures for
log, zeta values at integers >= 2, and the Euler-Mascheroni constant.

The transcendental enclosures share one proof pattern: an exact partial
sum plus a tail located by an Euler-Maclaurin expansion whose remainder,
for a completely monotone integrand, has the sign of the first omitted
correction and smaller magnitude.  The true tail therefore lies between
consecutive correction levels, and the hull of the two is a certificate.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial, perm
from typing import Union

from .arith import bernoulli

__all__ = [
    "IntervalReal",
    "log_interval",
    "zeta_interval",
    "euler_gamma_interval",
]

Rational = Union[int, Fraction]


def _as_fraction(x: Rational) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


@dataclass(frozen=True)
class IntervalReal:
    """A closed interval [lo, hi] with exact Fraction endpoints."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self) -> None:
        if not (isinstance(self.lo, Fraction) and isinstance(self.hi, Fraction)):
            object.__setattr__(self, "lo", _as_fraction(self.lo))
            object.__setattr__(self, "hi", _as_fraction(self.hi))
        if self.lo > self.hi:
            raise ValueError(f"empty interval: lo={self.lo} > hi={self.hi}")

    @classmethod
    def point(cls, x: Rational) -> "IntervalReal":
        x = _as_fraction(x)
        return cls(x, x)

    @classmethod
    def hull(cls, *items: Union["IntervalReal", Rational]) -> "IntervalReal":
        """Smallest interval containing every argument."""
        if not items:
            raise ValueError("hull of nothing")
        ivs = [x if isinstance(x, IntervalReal) else cls.point(x) for x in items]
        return cls(min(iv.lo for iv in ivs), max(iv.hi for iv in ivs))

    # -- queries ----------------------------------------------------------

    def width(self) -> Fraction:
        return self.hi - self.lo

    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, x: Rational) -> bool:
        x = _as_fraction(x)
        return self.lo <= x <= self.hi

    def encloses(self, other: "IntervalReal") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def overlaps(self, other: "IntervalReal") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def is_negative(self) -> bool:
        """Certified: every represented value is < 0."""
        return self.hi < 0

    def is_positive(self) -> bool:
        return self.lo > 0

    def abs_upper(self) -> Fraction:
        return max(abs(self.lo), abs(self.hi))

    def abs_lower(self) -> Fraction:
        """Certified lower bound on |x| over the interval."""
        if self.lo <= 0 <= self.hi:
            return Fraction(0)
        return min(abs(self.lo), abs(self.hi))

    # -- arithmetic -------------------------------------------------------

    def __neg__(self) -> "IntervalReal":
        return IntervalReal(-self.hi, -self.lo)

    def __add__(self, other: Union["IntervalReal", Rational]) -> "IntervalReal":
        if isinstance(other, IntervalReal):
            return IntervalReal(self.lo + other.lo, self.hi + other.hi)
        x = _as_fraction(other)
        return IntervalReal(self.lo + x, self.hi + x)

    __radd__ = __add__

    def __sub__(self, other: Union["IntervalReal", Rational]) -> "IntervalReal":
        return self + (-other if isinstance(other, IntervalReal) else -_as_fraction(other))

    def __rsub__(self, other: Rational) -> "IntervalReal":
        return (-self) + _as_fraction(other)

    def __mul__(self, other: Union["IntervalReal", Rational]) -> "IntervalReal":
        if isinstance(other, IntervalReal):
            products = (
                self.lo * other.lo,
                self.lo * other.hi,
                self.hi * other.lo,
                self.hi * other.hi,
            )
            return IntervalReal(min(products), max(products))
        x = _as_fraction(other)
        if x >= 0:
            return IntervalReal(self.lo * x, self.hi * x)
        return IntervalReal(self.hi * x, self.lo * x)

    __rmul__ = __mul__

    def _reciprocal(self) -> "IntervalReal":
        if self.lo <= 0 <= self.hi:
            raise ZeroDivisionError("interval divisor contains zero")
        return IntervalReal(1 / self.hi, 1 / self.lo)

    def __truediv__(self, other: Union["IntervalReal", Rational]) -> "IntervalReal":
        if isinstance(other, IntervalReal):
            return self * other._reciprocal()
        x = _as_fraction(other)
        if x == 0:
            raise ZeroDivisionError("interval division by zero")
        return self * (1 / x)

    def __rtruediv__(self, other: Rational) -> "IntervalReal":
        return self._reciprocal() * _as_fraction(other)

    # -- rounding ---------------------------------------------------------

    def round_outward(self, bits: int) -> "IntervalReal":
        """Widen to the enclosing interval with denominators dividing 2^bits.

        Caps endpoint size after long computations; the result still
        contains everything the original did.
        """
        if bits < 1:
            raise ValueError(f"bits must be >= 1, got {bits}")
        scale = 1 << bits
        lo = Fraction((self.lo.numerator * scale) // self.lo.denominator, scale)
        hi = Fraction(-((-self.hi.numerator * scale) // self.hi.denominator), scale)
        return IntervalReal(lo, hi)


# ---------------------------------------------------------------------------
# Logarithm
# ---------------------------------------------------------------------------


def _atanh_enclosure(x: Fraction, work_bits: int) -> IntervalReal:
    """Enclosure of atanh(x) for |x| <= 1/2 by the odd power series.

    The omitted tail past x^(2k+1) is a subgeometric series bounded by
    |x|^(2k+3) / ((2k+3)(1 - x^2)), with the sign of x since every term
    shares it.
    """
    if not abs(x) <= Fraction(1, 2):
        raise ValueError(f"atanh series restricted to |x| <= 1/2, got {x}")
    wb = work_bits + 16
    xi = IntervalReal.point(x).round_outward(wb)
    x_sq = (xi * xi).round_outward(wb)
    gap_lo = 1 - x_sq.hi  # lower bound for 1 - x^2, here >= 3/4
    threshold = Fraction(1, 1 << work_bits)
    total = IntervalReal.point(0)
    power = xi  # encloses x^(2k+1)
    k = 0
    while True:
        total = (total + power / (2 * k + 1)).round_outward(wb)
        power = (power * x_sq).round_outward(wb)
        bound = power.abs_upper() / ((2 * k + 3) * gap_lo)
        if bound <= threshold:
            break
        k += 1
    if x >= 0:
        return total + IntervalReal(Fraction(0), bound)
    return total + IntervalReal(-bound, Fraction(0))


@lru_cache(maxsize=None)
def _ln_two(work_bits: int) -> IntervalReal:
    # log 2 = 2 atanh(1/3)
    return _atanh_enclosure(Fraction(1, 3), work_bits) * 2


def log_interval(value: Rational, precision_bits: int = 128) -> IntervalReal:
    """Certified enclosure of log(value) for a positive rational.

    The argument is scaled by a power of two into [3/4, 3/2), where
    log t = 2 atanh((t-1)/(t+1)) with |(t-1)/(t+1)| <= 1/5.  Resulting
    width is below 2^(8 - precision_bits).
    """
    s = _as_fraction(value)
    if s <= 0:
        raise ValueError(f"log needs a positive argument, got {s}")
    if precision_bits < 8:
        raise ValueError(f"precision_bits must be >= 8, got {precision_bits}")
    shift = s.numerator.bit_length() - s.denominator.bit_length()
    t = s / Fraction(2) ** shift
    if t >= Fraction(3, 2):
        t /= 2
        shift += 1
    elif t < Fraction(3, 4):
        t *= 2
        shift -= 1
    wb = precision_bits + 32 + max(0, abs(shift).bit_length())
    result = _atanh_enclosure((t - 1) / (t + 1), wb) * 2
    if shift:
        result = result + _ln_two(wb) * shift
    return result.round_outward(precision_bits + 8)


# ---------------------------------------------------------------------------
# Zeta values at integer arguments
# ---------------------------------------------------------------------------


def _rising(m: int, n: int) -> int:
    # (m)_n = m (m+1) ... (m+n-1)
    return perm(m + n - 1, n)


def _zeta_em_enclosure(m: int, terms: int, corrections: int) -> IntervalReal:
    """Partial sum over n <= terms plus a bracketed Euler-Maclaurin tail.

    With a = terms + 1 the tail sum_{n>=a} n^-m expands as
    a^(1-m)/(m-1) + a^-m/2 + sum_j B_2j/(2j)! (m)_{2j-1} a^-(m+2j-1);
    x^-m is completely monotone, so stopping after K corrections leaves a
    remainder with the sign of correction K+1 and smaller magnitude.  The
    true value is therefore between the K and K+1 partial expansions.
    """
    partial = sum(Fraction(1, n**m) for n in range(1, terms + 1))
    a = terms + 1
    bern = bernoulli(2 * corrections + 2)

    def correction(j: int) -> Fraction:
        return (
            Fraction(bern.b(2 * j), factorial(2 * j))
            * _rising(m, 2 * j - 1)
            / a ** (m + 2 * j - 1)
        )

    level_k = (
        Fraction(1, (m - 1) * a ** (m - 1))
        + Fraction(1, 2 * a**m)
        + sum(correction(j) for j in range(1, corrections + 1))
    )
    level_k1 = level_k + correction(corrections + 1)
    return IntervalReal.hull(level_k, level_k1) + partial


def zeta_interval(
    m: int,
    precision_bits: int = 128,
    terms: int | None = None,
    corrections: int | None = None,
) -> IntervalReal:
    """Certified enclosure of zeta(m) for integer m >= 2.

    By default the partial-sum length and correction count grow until the
    width drops below 2^(8 - precision_bits).  Passing ``terms`` and/or
    ``corrections`` pins the expansion instead: the enclosure is still
    sound (any parameterization is), but no width target is enforced, so
    independent parameterizations can be compared for consistency.
    """
    if m < 2:
        raise ValueError(f"zeta enclosure needs m >= 2, got {m}")
    if precision_bits < 8:
        raise ValueError(f"precision_bits must be >= 8, got {precision_bits}")
    if terms is not None or corrections is not None:
        n = terms if terms is not None else 32
        k = corrections if corrections is not None else 8
        if n < 1 or k < 1:
            raise ValueError("terms and corrections must be >= 1")
        return _zeta_em_enclosure(m, n, k).round_outward(precision_bits + 16)
    target = Fraction(1, 1 << (precision_bits - 8))
    n, k = 32, 8
    while True:
        enclosure = _zeta_em_enclosure(m, n, k).round_outward(precision_bits + 16)
        if enclosure.width() <= target:
            return enclosure
        n *= 2
        k += 4


# ---------------------------------------------------------------------------
# Euler-Mascheroni constant
# ---------------------------------------------------------------------------


def _gamma_em_enclosure(n: int, corrections: int, work_bits: int) -> IntervalReal:
    # gamma = H_n - log n - 1/(2n) + sum_j B_2j/(2j) n^-2j + remainder,
    # remainder again bracketed by the first omitted correction.
    harmonic = sum(Fraction(1, k) for k in range(1, n + 1))
    bern = bernoulli(2 * corrections + 2)

    def correction(j: int) -> Fraction:
        return Fraction(bern.b(2 * j), 2 * j) / n ** (2 * j)

    level_k = (
        harmonic
        - Fraction(1, 2 * n)
        + sum(correction(j) for j in range(1, corrections + 1))
    )
    level_k1 = level_k + correction(corrections + 1)
    return IntervalReal.hull(level_k, level_k1) - log_interval(n, work_bits)


def euler_gamma_interval(precision_bits: int = 128) -> IntervalReal:
    """Certified enclosure of the Euler-Mascheroni constant.

    Width below 2^(8 - precision_bits); the evaluation point n is a power
    of two so the log reduces to a multiple of log 2.
    """
    if precision_bits < 8:
        raise ValueError(f"precision_bits must be >= 8, got {precision_bits}")
    target = Fraction(1, 1 << (precision_bits - 8))
    n, k = 64, 12
    while True:
        enclosure = _gamma_em_enclosure(n, k, precision_bits + 32)
        enclosure = enclosure.round_outward(precision_bits + 16)
        if enclosure.width() <= target:
            return enclosure
        n *= 2
        k += 4
