"""CSV ingestion, date alignment, and calendar-month partitioning.

File contracts:

* price CSV — header ``entity,date,close``; ISO-8601 dates; positive
  decimal closes; one file may carry many entities.
* rate CSV — header ``date,rate``; the rate is a per-observation decimal
  fraction (0.0001 = 1 bp per day). Negative rates are legal.

Rates are treated as step functions between fixings: a price date with no
rate row takes the most recent prior rate (last observation carried
forward). Trading-calendar gaps are simply absent rows, never imputed.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from datetime import date

PRICE_HEADER = ("entity", "date", "close")
RATE_HEADER = ("date", "rate")


@dataclass(frozen=True)
class PriceSeries:
    """Dated closing prices for one entity, strictly ascending by date."""

    entity_id: str
    observations: tuple[tuple[date, float], ...]

    def __post_init__(self):
        if len(self.observations) < 2:
            raise ValueError(
                f"{self.entity_id!r}: need at least 2 observations, "
                f"got {len(self.observations)}"
            )
        prev = None
        for d, close in self.observations:
            if prev is not None and d <= prev:
                raise ValueError(f"{self.entity_id!r}: dates not strictly increasing at {d}")
            if not (close > 0.0 and math.isfinite(close)):
                raise ValueError(f"{self.entity_id!r}: non-positive close {close!r} on {d}")
            prev = d

    @property
    def dates(self) -> tuple[date, ...]:
        return tuple(d for d, _ in self.observations)

    @property
    def closes(self) -> tuple[float, ...]:
        return tuple(c for _, c in self.observations)


@dataclass(frozen=True)
class RiskFreeSeries:
    """Dated risk-free rates, strictly ascending by date."""

    observations: tuple[tuple[date, float], ...]

    def __post_init__(self):
        if not self.observations:
            raise ValueError("rate series is empty")
        prev = None
        for d, rate in self.observations:
            if prev is not None and d <= prev:
                raise ValueError(f"rate dates not strictly increasing at {d}")
            if not math.isfinite(rate):
                raise ValueError(f"non-finite rate {rate!r} on {d}")
            prev = d

    @property
    def dates(self) -> tuple[date, ...]:
        return tuple(d for d, _ in self.observations)


@dataclass(frozen=True)
class AlignedSeries:
    """Price dates paired with the rate applicable on each date."""

    entity_id: str
    rows: tuple[tuple[date, float, float], ...]  # (date, close, rate)

    @property
    def dates(self) -> tuple[date, ...]:
        return tuple(r[0] for r in self.rows)


@dataclass(frozen=True)
class MonthWindow:
    """Half-open index span [start, stop) of one calendar month."""

    entity_id: str
    month_key: tuple[int, int]
    start: int
    stop: int

    @property
    def obs_count(self) -> int:
        return self.stop - self.start


@dataclass(frozen=True)
class SkippedMonth:
    """Month excluded for having fewer observations than the floor."""

    entity_id: str
    month_key: tuple[int, int]
    obs_count: int


def _read_rows(path, expected_header):
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise ValueError(f"cannot read {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file") from None
        if tuple(h.strip() for h in header) != expected_header:
            raise ValueError(
                f"{path}: expected header {','.join(expected_header)!r}, "
                f"got {','.join(header)!r}"
            )
        return list(reader)


def load_prices(path, entity_id: str) -> PriceSeries:
    """Load one entity's rows from a price CSV, sorted by date."""
    rows = _read_rows(path, PRICE_HEADER)
    picked = []
    for lineno, row in enumerate(rows, start=2):
        if not row:
            continue
        if len(row) != 3:
            raise ValueError(f"{path}:{lineno}: expected 3 fields, got {len(row)}")
        entity, date_s, close_s = (f.strip() for f in row)
        if entity != entity_id:
            continue
        try:
            d = date.fromisoformat(date_s)
        except ValueError:
            raise ValueError(f"{path}:{lineno}: bad date {date_s!r}") from None
        try:
            close = float(close_s)
        except ValueError:
            raise ValueError(f"{path}:{lineno}: bad close {close_s!r}") from None
        if not (close > 0.0 and math.isfinite(close)):
            raise ValueError(f"{path}:{lineno}: non-positive close {close_s!r}")
        picked.append((d, close, lineno))
    if len(picked) < 2:
        raise ValueError(f"{path}: entity {entity_id!r} has {len(picked)} rows, need >= 2")
    picked.sort(key=lambda t: t[0])
    for (d1, _, l1), (d2, _, l2) in zip(picked, picked[1:]):
        if d1 == d2:
            raise ValueError(f"{path}: duplicate date {d1} for {entity_id!r} (rows {l1}, {l2})")
    return PriceSeries(entity_id, tuple((d, c) for d, c, _ in picked))


def list_entities(path) -> list[str]:
    """Distinct entity ids in a price CSV, in first-appearance order."""
    rows = _read_rows(path, PRICE_HEADER)
    seen: dict[str, None] = {}
    for row in rows:
        if row:
            seen.setdefault(row[0].strip())
    return list(seen)


def load_rates(path) -> RiskFreeSeries:
    """Load a rate CSV, sorted by date."""
    rows = _read_rows(path, RATE_HEADER)
    picked = []
    for lineno, row in enumerate(rows, start=2):
        if not row:
            continue
        if len(row) != 2:
            raise ValueError(f"{path}:{lineno}: expected 2 fields, got {len(row)}")
        date_s, rate_s = (f.strip() for f in row)
        try:
            d = date.fromisoformat(date_s)
        except ValueError:
            raise ValueError(f"{path}:{lineno}: bad date {date_s!r}") from None
        try:
            rate = float(rate_s)
        except ValueError:
            raise ValueError(f"{path}:{lineno}: bad rate {rate_s!r}") from None
        if not math.isfinite(rate):
            raise ValueError(f"{path}:{lineno}: non-finite rate {rate_s!r}")
        picked.append((d, rate, lineno))
    picked.sort(key=lambda t: t[0])
    for (d1, _, l1), (d2, _, l2) in zip(picked, picked[1:]):
        if d1 == d2:
            raise ValueError(f"{path}: duplicate rate date {d1} (rows {l1}, {l2})")
    return RiskFreeSeries(tuple((d, r) for d, r, _ in picked))


def write_prices(path, series_list) -> None:
    """Serialize price series back to the standard CSV (full float precision)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(PRICE_HEADER)
        for series in series_list:
            for d, close in series.observations:
                writer.writerow([series.entity_id, d.isoformat(), repr(close)])


def write_rates(path, rates: RiskFreeSeries) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(RATE_HEADER)
        for d, rate in rates.observations:
            writer.writerow([d.isoformat(), repr(rate)])


def align(prices: PriceSeries, rates: RiskFreeSeries) -> AlignedSeries:
    """Pair each price date with the rate in force on that date (LOCF).

    The output date set equals the price date set exactly; a price date
    earlier than the first rate fixing has no derivable rate and raises.
    """
    rate_obs = rates.observations
    first_rate_date = rate_obs[0][0]
    rows = []
    j = 0
    for d, close in prices.observations:
        if d < first_rate_date:
            raise ValueError(
                f"{prices.entity_id!r}: price date {d} precedes first rate date {first_rate_date}"
            )
        while j + 1 < len(rate_obs) and rate_obs[j + 1][0] <= d:
            j += 1
        rows.append((d, close, rate_obs[j][1]))
    return AlignedSeries(prices.entity_id, tuple(rows))


def partition_months(dates, min_obs: int, entity_id: str = ""):
    """Group an ascending date sequence into calendar-month windows.

    Returns (windows, skipped): months with at least ``min_obs``
    observations become MonthWindow spans into the input sequence, the
    rest become SkippedMonth records. Nothing is silently dropped.
    """
    dates = list(dates)
    if not dates:
        raise ValueError("cannot partition an empty series")
    if min_obs < 2:
        raise ValueError(f"min_obs must be >= 2, got {min_obs}")
    windows: list[MonthWindow] = []
    skipped: list[SkippedMonth] = []
    start = 0
    for i in range(1, len(dates) + 1):
        boundary = i == len(dates) or (dates[i].year, dates[i].month) != (
            dates[start].year,
            dates[start].month,
        )
        if not boundary:
            continue
        key = (dates[start].year, dates[start].month)
        if i - start >= min_obs:
            windows.append(MonthWindow(entity_id, key, start, i))
        else:
            skipped.append(SkippedMonth(entity_id, key, i - start))
        start = i
    return windows, skipped
