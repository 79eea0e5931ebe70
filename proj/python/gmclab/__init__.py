"""Numerical laboratory for complex multiplicative chaos.

Thin Python face over the C++ core: parameter-plane geometry, log-correlated
field synthesis on the torus, chaos sampling, wavelet regularity estimation
and heavy-tail statistics. Every sampling routine takes an explicit seed and
reproduces the same values for any thread count.
"""

from gmclab._core import (
    HillPoint,
    KsResult,
    TailReport,
    __version__,
    besov_estimate,
    besov_threshold,
    bootstrap_mean,
    boundary_polyline,
    chaos_realization,
    covariance_oracle,
    estimate_abs_moment,
    field_realization,
    gamma_exponent,
    in_ea,
    in_eap,
    ks_one_sample_uniform,
    ks_two_sample,
    optimal_r,
    pair_samples,
    predicted_level_exponent,
    predicted_moment_slope,
    real_moment_cutoff,
    run_plan,
    scaling_pair_samples,
    shipped_filters,
    sigma2_analytic,
    tail_index,
    validate_plan,
    wavelet_moment_scaling,
)

__all__ = [
    "HillPoint",
    "KsResult",
    "TailReport",
    "__version__",
    "besov_estimate",
    "besov_threshold",
    "bootstrap_mean",
    "boundary_polyline",
    "chaos_realization",
    "covariance_oracle",
    "estimate_abs_moment",
    "field_realization",
    "gamma_exponent",
    "in_ea",
    "in_eap",
    "ks_one_sample_uniform",
    "ks_two_sample",
    "optimal_r",
    "pair_samples",
    "predicted_level_exponent",
    "predicted_moment_slope",
    "real_moment_cutoff",
    "run_plan",
    "scaling_pair_samples",
    "shipped_filters",
    "sigma2_analytic",
    "tail_index",
    "validate_plan",
    "wavelet_moment_scaling",
]
