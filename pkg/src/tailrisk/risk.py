"""Monthly Value-at-Risk and the risk-fluctuation-range (RFR) index.

Each calendar-month window gets its own threshold (empirical quantile of
the month's losses) and its own GPD fit on the strict exceedances; the
VaR at confidence p is the implied tail quantile

    VaR = mu + (sigma/k) * (1 - ((n/n_u) * (1-p))^k)        (k != 0)
    VaR = mu + sigma * log(n_u / (n * (1-p)))               (k  = 0)

which reduces to the plain GPD quantile at mu = 0, n = n_u and equals mu
exactly when p sits at the threshold's own empirical level. RFR is the
month-over-month slope of the VaR series with a time step of one month,
so it is simply the first difference; its sign says whether risk rose or
fell. Windows that were skipped or whose fit failed propagate as explicit
missing values and break the RFR chain - no slope ever spans a gap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import gpd
from .gpd import GpdFit, DegenerateSampleError
from .ingest import MonthWindow, SkippedMonth
from .returns import ExcessReturnSeries
from .threshold import threshold_by_quantile
from ._kernels import K_ZERO_TOL

STATUS_OK = "ok"
STATUS_SKIPPED = "skipped_min_obs"
STATUS_FAILED = "fit_failed"


@dataclass(frozen=True)
class VarPoint:
    """One entity-month: VaR value when status is ok, else a reason code."""

    entity_id: str
    month_key: tuple[int, int]
    var: float | None
    fit: GpdFit | None
    p: float
    status: str
    reason: str | None = None


@dataclass(frozen=True)
class RfrPoint:
    """Slope of VaR between two adjacent ok months (time step = 1 month)."""

    entity_id: str
    month_pair: tuple[tuple[int, int], tuple[int, int]]
    rfr: float


def var_from_fit(fit: GpdFit, p: float) -> float:
    """Tail quantile at confidence p implied by a fitted window."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must be in (0, 1), got {p!r}")
    ratio = (fit.n / fit.n_u) * (1.0 - p)
    if ratio > 1.0:
        raise ValueError(
            f"p={p!r} is below the threshold's empirical level "
            f"{1.0 - fit.n_u / fit.n!r}"
        )
    k, sigma = fit.params.k, fit.params.sigma
    if abs(k) < K_ZERO_TOL:
        return fit.mu - sigma * math.log(ratio)
    return fit.mu - (sigma / k) * math.expm1(k * math.log(ratio))


def var_for_window(
    window_losses,
    threshold_confidence: float,
    p: float,
    estimator: str = gpd.PROFILE_MLE,
    r_zhang: float = -0.5,
    entity_id: str = "",
    month_key: tuple[int, int] = (0, 0),
) -> VarPoint:
    """Threshold, fit, and VaR for one window of losses.

    Fit problems never raise; they come back as status=fit_failed with a
    reason code so batch runs over many windows keep going.
    """
    if not 0.0 < threshold_confidence < p < 1.0:
        raise ValueError(
            f"need 0 < threshold_confidence < p < 1, got "
            f"threshold_confidence={threshold_confidence!r}, p={p!r}"
        )
    losses = np.asarray(window_losses, dtype=np.float64)
    if losses.size == 0:
        raise ValueError("window is empty")

    def failed(reason, fit=None):
        return VarPoint(entity_id, month_key, None, fit, p, STATUS_FAILED, reason)

    choice = threshold_by_quantile(losses, threshold_confidence)
    n = losses.size
    if choice.n_u == 0:
        return failed("no_exceedances")
    if p <= 1.0 - choice.n_u / n:
        return failed("p_not_above_threshold_level")
    exceedances = losses[losses > choice.mu] - choice.mu
    if exceedances.size < 3:
        return failed("too_few_exceedances")
    if estimator not in gpd.ESTIMATORS:
        raise ValueError(f"unknown estimator {estimator!r}")
    try:
        if estimator == gpd.ZHANG_LM:
            fit = gpd.fit_zhang_lm(exceedances, r_zhang, mu=choice.mu, n=n)
        else:
            fit = gpd.fit_profile_mle(exceedances, mu=choice.mu, n=n)
    except DegenerateSampleError:
        return failed("degenerate_sample")
    except ValueError:
        return failed("fit_error")
    if not fit.converged:
        return failed("fit_not_converged", fit)
    return VarPoint(entity_id, month_key, var_from_fit(fit, p), fit, p, STATUS_OK)


def var_series(
    returns: ExcessReturnSeries,
    windows: list[MonthWindow],
    skipped: list[SkippedMonth],
    threshold_confidence: float = 0.80,
    p: float = 0.95,
    estimator: str = gpd.PROFILE_MLE,
    r_zhang: float = -0.5,
    pool_window: int = 1,
) -> list[VarPoint]:
    """Per-month VaR points for one entity, in chronological order.

    ``pool_window`` widens the estimation sample to the trailing N
    qualifying windows (default 1 = the month itself); the threshold and
    fit are recomputed on the pooled losses, the VaR is still stamped on
    the current month.
    """
    if pool_window < 1:
        raise ValueError(f"pool_window must be >= 1, got {pool_window}")
    losses = np.asarray(returns.losses, dtype=np.float64)
    points = []
    for i, window in enumerate(windows):
        pool = windows[max(0, i - pool_window + 1) : i + 1]
        sample = np.concatenate([losses[w.start : w.stop] for w in pool])
        points.append(
            var_for_window(
                sample,
                threshold_confidence,
                p,
                estimator,
                r_zhang,
                entity_id=returns.entity_id,
                month_key=window.month_key,
            )
        )
    for s in skipped:
        points.append(
            VarPoint(returns.entity_id, s.month_key, None, None, p, STATUS_SKIPPED, "min_obs")
        )
    points.sort(key=lambda pt: pt.month_key)
    return points


def next_month(key: tuple[int, int]) -> tuple[int, int]:
    year, month = key
    return (year + 1, 1) if month == 12 else (year, month + 1)


def rfr_series(var_points: list[VarPoint]) -> list[RfrPoint]:
    """First differences of VaR over calendar-adjacent ok months.

    Skipped or failed months break the chain; no slope spans a gap.
    """
    keys = [pt.month_key for pt in var_points]
    if keys != sorted(keys) or len(set(keys)) != len(keys):
        raise ValueError("var points must be sorted by month with no duplicates")
    out = []
    for prev, cur in zip(var_points, var_points[1:]):
        if prev.status != STATUS_OK or cur.status != STATUS_OK:
            continue
        if next_month(prev.month_key) != cur.month_key:
            continue
        out.append(
            RfrPoint(
                cur.entity_id,
                (prev.month_key, cur.month_key),
                cur.var - prev.var,
            )
        )
    return out


def sign_fractions(rfr_points):
    """Fractions of RFR values above, below, and exactly at zero."""
    values = [getattr(p, "rfr", p) for p in rfr_points]
    if not values:
        raise ValueError("need at least one RFR value")
    n = len(values)
    above = sum(1 for v in values if v > 0.0)
    below = sum(1 for v in values if v < 0.0)
    zero = n - above - below
    return above / n, below / n, zero / n
