"""Tail-risk analytics for daily price series.

Peaks-over-threshold pipeline: excess returns, per-window generalized
Pareto fits, monthly Value-at-Risk, the risk-fluctuation-range slope
index, and cross-entity correlation/aggregation reports.
"""

__version__ = "0.1.0"

from .gpd import (
    DegenerateSampleError,
    GpdFit,
    GpdParams,
    fit_profile_mle,
    fit_zhang_lm,
    gpd_cdf,
    gpd_log_likelihood,
    gpd_quantile,
)

__all__ = [
    "DegenerateSampleError",
    "GpdFit",
    "GpdParams",
    "fit_profile_mle",
    "fit_zhang_lm",
    "gpd_cdf",
    "gpd_log_likelihood",
    "gpd_quantile",
    "__version__",
]
