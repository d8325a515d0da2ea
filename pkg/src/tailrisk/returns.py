"""Excess returns over the risk-free rate, and the loss series.

For consecutive closes a[t-1], a[t] and the aligned per-period rate r[t]:

    ar[t]   = (a[t] - a[t-1] - a[t-1]*r[t]) / a[t-1]
    loss[t] = -ar[t]

All downstream tail fitting runs on the LOSS series: downside risk lives
in the lower tail of returns, and the fitted model is an upper tail over a
positive threshold, so losses are negated excess returns. The first price
observation produces no return.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import date

from .ingest import AlignedSeries


@dataclass(frozen=True)
class ExcessReturnSeries:
    """Per-date excess returns and their negations."""

    entity_id: str
    observations: tuple[tuple[date, float, float], ...]  # (date, ar, loss)

    def __post_init__(self):
        for d, ar, loss in self.observations:
            if not (math.isfinite(ar) and math.isfinite(loss)):
                raise ValueError(f"{self.entity_id!r}: non-finite return on {d}")
            if loss != -ar:
                raise ValueError(f"{self.entity_id!r}: loss != -ar on {d}")

    @property
    def dates(self) -> tuple[date, ...]:
        return tuple(d for d, _, _ in self.observations)

    @property
    def losses(self) -> tuple[float, ...]:
        return tuple(loss for _, _, loss in self.observations)


def excess_returns(aligned: AlignedSeries) -> ExcessReturnSeries:
    """Excess-return series of an aligned (date, close, rate) series."""
    rows = aligned.rows
    if len(rows) < 2:
        raise ValueError(f"{aligned.entity_id!r}: need >= 2 aligned observations")
    obs = []
    for (_, prev_close, _), (d, close, rate) in zip(rows, rows[1:]):
        ar = (close - prev_close - prev_close * rate) / prev_close
        obs.append((d, ar, -ar))
    return ExcessReturnSeries(aligned.entity_id, tuple(obs))
