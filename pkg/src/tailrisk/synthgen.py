"""Deterministic synthetic market data for tests and bundled examples.

All randomness comes from a 64-bit linear congruential generator with
Knuth's MMIX constants (state' = state * 6364136223846793005 +
1442695040888963407 mod 2^64; uniforms take the top 53 bits), so streams
reproduce bit-for-bit on any platform. Per-entity substreams derive their
seeds through SplitMix64 so entities stay statistically independent.

Daily entity shocks are sign-symmetric GPD draws (inverse-CDF transform);
an optional common factor with a deterministic monthly volatility cycle
mixes in co-movement. Returns are floored at -99% before compounding so
prices stay positive unconditionally.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import date, timedelta

from .gpd import GpdParams, gpd_quantile
from .ingest import PriceSeries, RiskFreeSeries

_MASK64 = (1 << 64) - 1


def splitmix64(value: int) -> int:
    """One SplitMix64 scramble; used to derive independent substream seeds."""
    value = (value + 0x9E3779B97F4A7C15) & _MASK64
    z = value
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


class Lcg64:
    """64-bit LCG (MMIX constants); top 53 bits give uniforms in [0, 1)."""

    MULT = 6364136223846793005
    INC = 1442695040888963407

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state * self.MULT + self.INC) & _MASK64
        return self.state

    def uniform(self) -> float:
        return (self.next_u64() >> 11) / float(1 << 53)

    def sign(self) -> float:
        return 1.0 if self.next_u64() >> 63 else -1.0


@dataclass(frozen=True)
class SynthSpec:
    """Fully seed-determined recipe for a multi-entity price panel."""

    seed: int
    n_entities: int = 4
    n_days: int = 500
    shape: float = -0.1
    scale: float = 0.012
    common_factor_weight: float = 0.0
    factor_shape: float = -0.15
    factor_scale: float = 0.012
    start: date = date(2018, 1, 1)
    start_price: float = 100.0
    daily_rate: float = 1e-4

    def __post_init__(self):
        if self.n_entities < 1:
            raise ValueError(f"n_entities must be >= 1, got {self.n_entities}")
        if self.n_days < 2:
            raise ValueError(f"n_days must be >= 2, got {self.n_days}")
        if not 0.0 <= self.common_factor_weight <= 1.0:
            raise ValueError(
                f"common_factor_weight must be in [0, 1], got {self.common_factor_weight!r}"
            )

    def entity_id(self, i: int) -> str:
        return f"E{i:02d}"


def sample_gpd(n: int, params: GpdParams, seed: int = 0, uniforms=None) -> list[float]:
    """Inverse-CDF GPD draws from the seeded uniform stream.

    ``uniforms`` overrides the stream with explicit levels (testing hook).
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if uniforms is None:
        rng = Lcg64(seed)
        uniforms = (rng.uniform() for _ in range(n))
    return [gpd_quantile(u, params) for u in uniforms]


def trading_days(start: date, count: int) -> list[date]:
    """The first ``count`` weekdays on or after ``start``."""
    days = []
    d = start
    while len(days) < count:
        if d.weekday() < 5:
            days.append(d)
        d += timedelta(days=1)
    return days


def _monthly_vol(month: int) -> float:
    """Deterministic volatility cycle applied to the common factor only."""
    return 1.0 + 0.6 * math.sin(2.0 * math.pi * (month - 1) / 12.0)


def generate_panel(spec: SynthSpec):
    """Price series for every entity plus a flat risk-free series.

    Daily return of entity i is w*f[t] + (1-w)*e[i,t] with w the
    common-factor weight; at w = 0 entities are fully independent, at
    w = 1 they are identical.
    """
    days = trading_days(spec.start, spec.n_days)
    w = spec.common_factor_weight

    factor_rng = Lcg64(splitmix64(spec.seed))
    factor_params = GpdParams(spec.factor_shape, spec.factor_scale)
    factor = [
        _monthly_vol(d.month) * factor_rng.sign() * gpd_quantile(factor_rng.uniform(), factor_params)
        for d in days[1:]
    ]

    series = []
    for i in range(spec.n_entities):
        rng = Lcg64(splitmix64(spec.seed ^ (i + 1)))
        params = GpdParams(spec.shape, spec.scale)
        price = spec.start_price
        obs = [(days[0], price)]
        for t, d in enumerate(days[1:]):
            shock = rng.sign() * gpd_quantile(rng.uniform(), params)
            ret = max(w * factor[t] + (1.0 - w) * shock, -0.99)
            price = price * (1.0 + ret)
            obs.append((d, price))
        series.append(PriceSeries(spec.entity_id(i), tuple(obs)))

    rates = RiskFreeSeries(tuple((d, spec.daily_rate) for d in days))
    return series, rates
