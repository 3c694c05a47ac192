"""Difference-based time-varying long-run covariance estimation.

Thin Python layer over the C++ core: debiased covariance curve estimation,
bootstrap specification tests (structural stability, long memory), extended
minimum volatility tuning selection and the built-in simulation scenarios.
"""

from ._core import (
    LrcovError,
    acute_sigma,
    beta_pilot,
    debiased_sigma,
    estimate_d_slope,
    frac_diff_coeffs,
    gcv_bandwidth,
    gen_scenario,
    grid_default,
    jackknife_fit,
    jackknife_kernel_eval,
    kappa2,
    kernel_eval,
    longmemory_test,
    matrix_sqrt_psd,
    monte_carlo,
    parse_regression_csv,
    select_tuning,
    structural_test,
    threshold_pd,
    weights,
)

__all__ = [
    "LrcovError",
    "acute_sigma",
    "beta_pilot",
    "debiased_sigma",
    "estimate_d_slope",
    "frac_diff_coeffs",
    "gcv_bandwidth",
    "gen_scenario",
    "grid_default",
    "jackknife_fit",
    "jackknife_kernel_eval",
    "kappa2",
    "kernel_eval",
    "longmemory_test",
    "matrix_sqrt_psd",
    "monte_carlo",
    "parse_regression_csv",
    "select_tuning",
    "structural_test",
    "threshold_pd",
    "weights",
]
