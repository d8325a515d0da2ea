"""Cross-entity analytics over monthly risk panels.

Panels are entity-by-month matrices with NaN for missing months (late
listings and suspensions make ragged coverage the norm, so missing
entries are data here, not faults). Correlations use pairwise-complete
overlap with population (1/n) normalization; the normalization choice
cancels in every ratio and is fixed only for bit-reproducibility.

Stacked shares decompose each month's total |RFR| magnitude across
entities: stacked-area plotting needs non-negative addends, so the
magnitude reading is used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class AlignedPanel:
    """Entity-by-month value matrix; NaN marks missing months."""

    entities: tuple[str, ...]
    months: tuple[tuple[int, int], ...]
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != (len(self.entities), len(self.months)):
            raise ValueError(
                f"panel shape {self.values.shape} does not match "
                f"{len(self.entities)} entities x {len(self.months)} months"
            )
        if any(b <= a for a, b in zip(self.months, self.months[1:])):
            raise ValueError("months must be strictly increasing")

    def row(self, entity_id: str) -> np.ndarray:
        return self.values[self.entities.index(entity_id)]


def panel_from_mapping(data: dict) -> AlignedPanel:
    """Build a panel from {entity: {month_key: value}} over the month union."""
    entities = tuple(data)
    months = tuple(sorted({m for per in data.values() for m in per}))
    values = np.full((len(entities), len(months)), np.nan)
    index = {m: j for j, m in enumerate(months)}
    for i, entity in enumerate(entities):
        for m, v in data[entity].items():
            values[i, index[m]] = v
    return AlignedPanel(entities, months, values)


@dataclass(frozen=True)
class CorrelationMatrix:
    entities: tuple[str, ...]
    rho: np.ndarray
    pair_counts: np.ndarray


@dataclass(frozen=True)
class ComparisonRow:
    """Entity-versus-index contrast: co-movement and volatility ratio."""

    entity: str
    index: str
    var_rho: float
    rfr_rho: float
    rfr_std_ratio: float


def pearson(x, y) -> float:
    """Population-normalized Pearson correlation over the finite overlap."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise ValueError("series lengths differ")
    mask = np.isfinite(x) & np.isfinite(y)
    if int(mask.sum()) < 2:
        raise ValueError(f"need an overlap of >= 2 points, got {int(mask.sum())}")
    xs, ys = x[mask], y[mask]
    dx = xs - xs.mean()
    dy = ys - ys.mean()
    sx = math.sqrt(float(np.mean(dx * dx)))
    sy = math.sqrt(float(np.mean(dy * dy)))
    if sx == 0.0 or sy == 0.0:
        raise ValueError("zero variance in an overlapping sub-series")
    return float(np.mean(dx * dy)) / (sx * sy)


def correlation_matrix(panel: AlignedPanel) -> CorrelationMatrix:
    """Pairwise-complete Pearson matrix; incomputable pairs stay NaN.

    The pair_counts matrix carries the overlap size for every pair, which
    is what explains any missing cell.
    """
    m = len(panel.entities)
    rho = np.full((m, m), np.nan)
    counts = np.zeros((m, m), dtype=np.int64)
    finite = np.isfinite(panel.values)
    for i in range(m):
        counts[i, i] = int(finite[i].sum())
        xi = panel.values[i][finite[i]]
        if xi.size >= 2 and float(np.min(xi)) != float(np.max(xi)):
            rho[i, i] = 1.0
    for i in range(m):
        for j in range(i + 1, m):
            overlap = int((finite[i] & finite[j]).sum())
            counts[i, j] = counts[j, i] = overlap
            try:
                r = pearson(panel.values[i], panel.values[j])
            except ValueError:
                continue
            rho[i, j] = rho[j, i] = r
    return CorrelationMatrix(panel.entities, rho, counts)


def stacked_shares(panel: AlignedPanel):
    """Per-month share of each entity in the total |value| magnitude.

    Returns (share panel, per-month totals). Months whose total magnitude
    is zero get all-zero shares; missing entries stay missing.
    """
    values = panel.values
    finite = np.isfinite(values)
    magnitudes = np.where(finite, np.abs(values), 0.0)
    totals = magnitudes.sum(axis=0)
    shares = np.full_like(values, np.nan)
    nonzero = totals > 0.0
    shares[:, nonzero] = magnitudes[:, nonzero] / totals[nonzero]
    shares[:, ~nonzero] = 0.0
    shares[~finite] = np.nan
    return AlignedPanel(panel.entities, panel.months, shares), totals


def compare_to_index(
    var_panel: AlignedPanel, rfr_panel: AlignedPanel, index_ids
) -> list[ComparisonRow]:
    """Contrast every non-index entity against every index.

    Per pair: Pearson of the VaR series, Pearson of the RFR series, and
    the ratio of RFR standard deviations (entity/index) over the RFR
    overlap. Pairs with no overlap at all are omitted; partially
    computable pairs carry NaN in the gaps.
    """
    index_ids = [i for i in index_ids if i in var_panel.entities]
    entity_ids = [e for e in var_panel.entities if e not in index_ids]
    rows = []
    for entity in entity_ids:
        for index in index_ids:
            var_rho = _safe_pearson(var_panel.row(entity), var_panel.row(index))
            rfr_rho = _safe_pearson(rfr_panel.row(entity), rfr_panel.row(index))
            std_ratio = _rfr_std_ratio(rfr_panel.row(entity), rfr_panel.row(index))
            if math.isnan(var_rho) and math.isnan(rfr_rho) and math.isnan(std_ratio):
                continue
            rows.append(ComparisonRow(entity, index, var_rho, rfr_rho, std_ratio))
    return rows


def _safe_pearson(x, y) -> float:
    try:
        return pearson(x, y)
    except ValueError:
        return math.nan


def _rfr_std_ratio(x, y) -> float:
    mask = np.isfinite(x) & np.isfinite(y)
    if int(mask.sum()) < 2:
        return math.nan
    xs, ys = x[mask], y[mask]
    sy = float(np.std(ys))
    if sy == 0.0:
        return math.nan
    return float(np.std(xs)) / sy
