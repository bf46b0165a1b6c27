"""Adaptive stratified Monte Carlo integration on the unit cube."""

from ._core import (
    BenchConfig,
    BenchRow,
    EstimateReport,
    Integrand,
    IoError,
    Partition,
    SplitDecision,
    UnsupportedError,
    estimate_adastrat,
    estimate_adastrat_rational,
    estimate_adastrat_with_variance,
    estimate_haber1,
    estimate_mc,
    estimate_oracle_stratified,
    fit_slope,
    grow_oracle,
    grow_pow2,
    grow_rational,
    linear,
    normal_quantile,
    predicted_rate_linear,
    run_bench,
    sine_counterexample,
    stratified_variance,
    to_csv,
    toy,
)

__all__ = [name for name in dir() if not name.startswith("_")]
