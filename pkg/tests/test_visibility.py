from __future__ import annotations

from fractions import Fraction
from math import comb

import pytest

from vispoints.arith import build_jordan_table, build_mobius_table
from vispoints.visibility import (
    AUTO_SIEVE_LIMIT,
    BudgetError,
    CountQuery,
    MertensCache,
    brute_force_count,
    brute_force_positive_count,
    count_via_orthants,
    first_difference,
    formal_series_check,
    formal_series_failures,
    jordan_summatory,
    positive_count_via_differences,
    positive_profile,
    summatory_cache,
    umbral_evaluate,
    umbral_polynomial,
    visible_count,
    visible_profile,
)


def test_count_query_validation():
    with pytest.raises(ValueError):
        CountQuery(0, 5)
    with pytest.raises(ValueError):
        CountQuery(2, -1)
    assert CountQuery.of(2, "7/2").radius == 3
    assert CountQuery.of(2, 2.9).radius == 2
    assert CountQuery.of(2, 4).radius == 4


def test_brute_force_known_values():
    assert brute_force_count(CountQuery(1, 5)) == 2
    assert brute_force_count(CountQuery(2, 1)) == 8
    assert brute_force_count(CountQuery(2, 2)) == 16
    assert brute_force_count(CountQuery(3, 1)) == 26
    assert brute_force_count(CountQuery(3, 2)) == 98
    assert brute_force_count(CountQuery(3, 3)) == 290
    for m in range(1, 5):
        assert brute_force_count(CountQuery(m, 0)) == 0
        assert brute_force_positive_count(CountQuery(m, 0)) == 0
    # only the all-ones tuple survives in the positive box at r = 1
    assert brute_force_positive_count(CountQuery(4, 1)) == 1
    assert brute_force_positive_count(CountQuery(2, 2)) == 3


def test_budget_guard_names_the_budget():
    with pytest.raises(BudgetError) as err:
        brute_force_count(CountQuery(6, 100))
    assert "1000000000" in str(err.value)
    with pytest.raises(BudgetError):
        brute_force_positive_count(CountQuery(2, 10), budget=50)


def test_profiles_agree_with_enumeration():
    for m in (1, 2, 3):
        profile = visible_profile(m, 10)
        positive = positive_profile(m, 10)
        for r in range(11):
            assert profile[r] == brute_force_count(CountQuery(m, r))
            assert positive[r] == brute_force_positive_count(CountQuery(m, r))


def test_first_difference_matches_profile_deltas():
    for m in (1, 2, 3, 4):
        positive = positive_profile(m, 30)
        for n in range(2, 31):
            assert first_difference(m, n) == positive[n] - positive[n - 1]
    with pytest.raises(ValueError):
        first_difference(2, 1)


def test_difference_assembly_and_orthants():
    for m in (1, 2, 3):
        for r in (0, 1, 2, 5, 8):
            expected = brute_force_count(CountQuery(m, r))
            assert positive_count_via_differences(m, r) == brute_force_positive_count(
                CountQuery(m, r)
            )
            if r:
                assert count_via_orthants(m, r, positive="brute") == expected
                assert count_via_orthants(m, r, positive="diff") == expected
    with pytest.raises(ValueError):
        count_via_orthants(2, 3, positive="nope")


def test_summatory_methods_agree():
    for j in range(0, 5):
        for r in (1, 2, 3, 10, 97, 1000):
            a = jordan_summatory(j, r, "sieve")
            b = jordan_summatory(j, r, "mobius_faulhaber")
            c = jordan_summatory(j, r, "blocked")
            assert a == b == c
    assert jordan_summatory(3, 0) == 0
    # order 0 summatory is the count of n = 1
    assert all(jordan_summatory(0, r) == 1 for r in (1, 5, 50))
    with pytest.raises(ValueError):
        jordan_summatory(2, 10, "unknown")
    with pytest.raises(ValueError):
        jordan_summatory(-1, 10)


def test_summatory_accepts_prebuilt_mobius():
    mobius = build_mobius_table(500)
    for j in (0, 1, 3):
        assert jordan_summatory(j, 500, "mobius_faulhaber", mobius) == jordan_summatory(
            j, 500, "sieve"
        )


def test_summatory_cache_prefix():
    cache = summatory_cache(2, 200)
    table = build_jordan_table(2, 200)
    running = 0
    for r in range(1, 201):
        running += table.value(r)
        assert cache.value(r) == running
    assert cache.value(0) == 0
    with pytest.raises(ValueError):
        cache.value(201)


def test_mertens_cache_inside_and_beyond_sieve():
    mobius = build_mobius_table(10_000)
    prefix = [0]
    for n in range(1, 10_001):
        prefix.append(prefix[-1] + mobius.mu(n))
    cache = MertensCache(300)
    for n in (1, 2, 3, 299, 300, 301, 1000, 9999, 10_000):
        assert cache.value(n) == prefix[n]


def test_umbral_coefficients():
    for m in range(1, 33):
        poly = umbral_polynomial(m)
        coeffs = poly.coefficients
        assert len(coeffs) == m + 2
        assert coeffs[m + 1] == 0
        assert coeffs[m] == 2**m
        for i, c in enumerate(coeffs):
            if (m - i) % 2 == 1:
                assert c == 0


@pytest.mark.parametrize("m", [1, 2, 3, 5, 8])
def test_umbral_polynomial_closed_form(m):
    # Q_m(T) = ((2T+1)^(m+1) - (2T-1)^(m+1)) / (2(m+1)) at rational points.
    poly = umbral_polynomial(m)
    for t in (Fraction(0), Fraction(1), Fraction(-3, 7), Fraction(22, 5)):
        direct = ((2 * t + 1) ** (m + 1) - (2 * t - 1) ** (m + 1)) / (2 * (m + 1))
        horner = sum(c * t**i for i, c in enumerate(poly.coefficients))
        assert horner == direct


def test_umbral_evaluation_counts_points():
    for m in (1, 2, 3, 4):
        poly = umbral_polynomial(m)
        for r in range(0, 9):
            assert umbral_evaluate(poly, r) == brute_force_count(CountQuery(m, r))


def test_umbral_evaluation_with_supplied_summatories():
    mobius = build_mobius_table(50)
    caches = {j: summatory_cache(j, 50, mobius) for j in range(3)}
    poly = umbral_polynomial(3)
    from_caches = umbral_evaluate(poly, 50, caches)
    from_callable = umbral_evaluate(poly, 50, lambda j, r: caches[j].value(r))
    assert from_caches == from_callable == umbral_evaluate(poly, 50)


def test_visible_count_dispatch():
    values = {
        method: visible_count(3, 7, method) for method in ("brute", "umbral", "orthant", "diff")
    }
    assert len(set(values.values())) == 1
    assert visible_count(2, 0) == 0
    with pytest.raises(ValueError):
        visible_count(2, 3, "nope")


def test_counts_are_monotone_in_radius():
    profile = visible_profile(3, 25)
    assert all(profile[r] <= profile[r + 1] for r in range(25))


def test_orthant_binomial_identity():
    # the sign/zero-pattern decomposition, spelled out at one radius
    r = 6
    for m in (2, 3):
        total = sum(
            comb(m, i) * 2 ** (m - i) * brute_force_positive_count(CountQuery(m - i, r))
            for i in range(m)
        )
        assert total == brute_force_count(CountQuery(m, r))


def test_formal_series_displays():
    assert formal_series_check(6, 2)
    assert formal_series_failures(4, 5) == []
    with pytest.raises(ValueError):
        formal_series_check(0, 3)


def test_auto_method_switch_limit_is_sane():
    assert AUTO_SIEVE_LIMIT >= 10**6
