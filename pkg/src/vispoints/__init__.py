"""Exact counting of lattice points visible from the origin, with
certified interval enclosures for the error against 2^m r^m / zeta(m)."""

from .arith import (
    CapacityError,
    MobiusTable,
    JordanTable,
    BernoulliSequence,
    PowerSumPolynomial,
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
from .visibility import (
    BudgetError,
    CountQuery,
    DEFAULT_BUDGET,
    IntegralityError,
    MertensCache,
    SummatoryCache,
    UmbralPolynomial,
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
from .intervals import (
    IntervalReal,
    euler_gamma_interval,
    log_interval,
    zeta_interval,
)
from .analysis import (
    ErrorScanRow,
    FractionalMobiusSum,
    WitnessBoundCertificate,
    WitnessReport,
    WitnessRow,
    certify_witness_bound,
    default_precision_bits,
    error_scan,
    error_term,
    fractional_mobius_sum,
    large_m_negativity_check,
    main_term,
    mobius_zeta_partial,
    negativity_failures,
    witness_scan,
    write_error_csv,
    zeta_gap_ok,
)

__version__ = "0.1.0"
