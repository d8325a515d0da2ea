"""Threshold selection and tail-fit diagnostics.

The operative rule is the empirical-quantile threshold (nearest-rank, 80%
by default downstream). The mean-excess curve, Hill curve, and
parameter-vs-threshold stability table are diagnostics for humans and
plots, not automated pickers. Exceedance is strict (x > u), which keeps
excesses positive for the density and the Hill logarithms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import gpd
from .gpd import GpdParams

QUANTILE = "quantile"
MEAN_EXCESS = "mean_excess"
HILL = "hill"
KS = "ks"


@dataclass(frozen=True)
class ThresholdChoice:
    mu: float
    method: str
    confidence: float
    n_u: int


def nearest_rank(n: int, q: float) -> int:
    """1-indexed nearest-rank order statistic: ceil(q*n).

    The tiny nudge keeps ranks stable when q*n is an exact integer that
    floating multiplication lands a few ulp high.
    """
    return max(1, min(n, math.ceil(q * n - 1e-12)))


def threshold_by_quantile(losses, confidence: float) -> ThresholdChoice:
    """Empirical-quantile threshold; exceedances counted strictly above it."""
    x = np.asarray(losses, dtype=np.float64)
    if x.size == 0:
        raise ValueError("losses must be nonempty")
    if not 0.0 < confidence < 1.0:
        raise ValueError(f"confidence must be in (0, 1), got {confidence!r}")
    mu = float(np.sort(x)[nearest_rank(x.size, confidence) - 1])
    n_u = int(np.count_nonzero(x > mu))
    return ThresholdChoice(mu=mu, method=QUANTILE, confidence=confidence, n_u=n_u)


def mean_excess_curve(losses, thresholds):
    """Conditional mean excess e(u) = mean(x - u | x > u) per threshold.

    Thresholds with no strict exceedance are omitted from the output.
    """
    x = np.asarray(losses, dtype=np.float64)
    if x.size == 0:
        raise ValueError("losses must be nonempty")
    out = []
    for u in thresholds:
        exceed = x[x > u]
        if exceed.size:
            out.append((float(u), float(np.mean(exceed - u))))
    return out


def hill_curve(losses):
    """Hill tail-index diagnostic over k = 1 .. n-1 top order statistics.

    h[k] = mean of the top-k log order statistics minus the log of the
    next one down. Requires strictly positive input.
    """
    x = np.sort(np.asarray(losses, dtype=np.float64), kind="stable")
    if x.size < 2:
        raise ValueError("need at least 2 losses")
    if np.any(x <= 0.0):
        raise ValueError("hill curve needs strictly positive losses")
    logs = np.log(x)
    top_sums = np.cumsum(logs[::-1])[:-1]  # sum of top k logs, k = 1..n-1
    ks = np.arange(1, x.size)
    h = top_sums / ks - logs[-1 - ks]
    return list(zip(ks.tolist(), h.tolist()))


def ks_statistic(exceedances, params: GpdParams) -> float:
    """Kolmogorov-Smirnov distance between the sample and a fitted GPD."""
    x = np.sort(np.asarray(exceedances, dtype=np.float64), kind="stable")
    if x.size == 0:
        raise ValueError("exceedances must be nonempty")
    n = x.size
    d = 0.0
    for i, xi in enumerate(x, start=1):
        f = gpd.gpd_cdf(float(xi), params)
        d = max(d, abs(i / n - f), abs((i - 1) / n - f))
    return d


def threshold_stability(losses, confidences, estimator: str = gpd.PROFILE_MLE,
                        r_zhang: float = -0.5):
    """Fit at a ladder of quantile thresholds: (u, k_hat, sigma_hat, ks) rows.

    Quantile levels whose exceedance sample is too small or degenerate are
    skipped; the table is for visual stability inspection.
    """
    x = np.asarray(losses, dtype=np.float64)
    rows = []
    for conf in confidences:
        choice = threshold_by_quantile(x, conf)
        exceed = x[x > choice.mu] - choice.mu
        if exceed.size < 3:
            continue
        try:
            if estimator == gpd.ZHANG_LM:
                fit = gpd.fit_zhang_lm(exceed, r_zhang, mu=choice.mu, n=x.size)
            else:
                fit = gpd.fit_profile_mle(exceed, mu=choice.mu, n=x.size)
        except ValueError:
            continue
        if not fit.converged:
            continue
        rows.append(
            (
                choice.mu,
                fit.params.k,
                fit.params.sigma,
                ks_statistic(exceed, fit.params),
            )
        )
    return rows
