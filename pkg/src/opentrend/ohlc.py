"""Daily OHLC bars: CSV ingestion, validation, and log-return volatility.

Input files are plain UTF-8 CSV with the exact header ``date,open,high,low,close``,
ISO-8601 dates, one trading day per row, strictly increasing dates.  Anything
else is rejected loudly — bad bars must never reach the feature stage.
"""

from __future__ import annotations

import datetime as dt
import math
from dataclasses import dataclass

import numpy as np

CSV_HEADER = "date,open,high,low,close"
PRICE_FIELDS = ("open", "high", "low", "close")


class OhlcError(ValueError):
    """Malformed or invariant-violating OHLC input."""


# ---------------------------------------------------------------------------
# value types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OhlcBar:
    """One trading day.  Prices are positive and high/low bracket open/close."""

    date: dt.date
    open: float
    high: float
    low: float
    close: float

    def __post_init__(self) -> None:
        for name in PRICE_FIELDS:
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float, np.floating)):
                raise OhlcError(f"{name} must be a number at {self.date}, got {value!r}")
            if not math.isfinite(value) or value <= 0.0:
                raise OhlcError(f"{name} must be a positive finite price at {self.date}, got {value!r}")
            # store plain Python floats so repr-based serialization round-trips
            object.__setattr__(self, name, float(value))
        if not (self.low <= self.open <= self.high and self.low <= self.close <= self.high):
            raise OhlcError(
                f"bar invariant violated at {self.date.isoformat()}: "
                f"open={self.open} high={self.high} low={self.low} close={self.close}"
            )

    def price(self, field: str) -> float:
        if field not in PRICE_FIELDS:
            raise OhlcError(f"unknown price field {field!r}")
        return float(getattr(self, field))


@dataclass(frozen=True, eq=False)
class OhlcSeries:
    """An ordered run of daily bars for one market (free-form tag)."""

    market: str
    bars: tuple[OhlcBar, ...]

    def __post_init__(self) -> None:
        for prev, cur in zip(self.bars, self.bars[1:]):
            if cur.date <= prev.date:
                raise OhlcError(
                    f"non-increasing dates: {cur.date.isoformat()} follows {prev.date.isoformat()}"
                )

    def __len__(self) -> int:
        return len(self.bars)

    def prices(self, field: str) -> np.ndarray:
        """All values of one price field as a float64 array."""
        if field not in PRICE_FIELDS:
            raise OhlcError(f"unknown price field {field!r}")
        return np.array([getattr(b, field) for b in self.bars], dtype=np.float64)

    @property
    def dates(self) -> tuple[dt.date, ...]:
        return tuple(b.date for b in self.bars)


@dataclass(frozen=True)
class VolatilityStats:
    """Log-return volatility summary over a bar series."""

    n_returns: int
    mean_return: float
    variance: float
    daily_volatility: float
    periodized_volatility: float
    period_days: int

    def __post_init__(self) -> None:
        if self.n_returns < 2:
            raise OhlcError("volatility needs at least 2 returns")
        if self.variance < 0.0 or self.daily_volatility < 0.0:
            raise OhlcError("variance and volatility must be non-negative")


# ---------------------------------------------------------------------------
# CSV ingestion / serialization
# ---------------------------------------------------------------------------


def parse_csv(text: str, market: str = "series") -> OhlcSeries:
    """Parse CSV text into an OhlcSeries, failing fast on any defect.

    Rejects: missing/mangled header, wrong field counts, non-ISO dates,
    non-numeric or non-positive prices, high/low bracket violations, and
    duplicate or out-of-order dates.  Never reorders rows silently.
    """
    lines = text.lstrip("﻿").splitlines()
    # trailing blank lines are tolerated, interior ones are not
    while lines and lines[-1].strip() == "":
        lines.pop()
    if not lines:
        raise OhlcError("empty file: no header row")
    if lines[0].strip() != CSV_HEADER:
        raise OhlcError(f"bad header: expected {CSV_HEADER!r}, got {lines[0].strip()!r}")
    bars: list[OhlcBar] = []
    prev_date: dt.date | None = None
    for lineno, line in enumerate(lines[1:], start=2):
        if line.strip() == "":
            raise OhlcError(f"blank row at line {lineno}")
        parts = line.strip().split(",")
        if len(parts) != 5:
            raise OhlcError(f"malformed row at line {lineno}: expected 5 fields, got {len(parts)}")
        try:
            day = dt.date.fromisoformat(parts[0])
        except ValueError:
            raise OhlcError(f"malformed row at line {lineno}: bad date {parts[0]!r}") from None
        values = []
        for name, raw in zip(PRICE_FIELDS, parts[1:]):
            try:
                values.append(float(raw))
            except ValueError:
                raise OhlcError(f"malformed row at line {lineno}: bad {name} {raw!r}") from None
        if prev_date is not None and day <= prev_date:
            raise OhlcError(
                f"non-increasing dates at line {lineno}: "
                f"{day.isoformat()} follows {prev_date.isoformat()}"
            )
        bars.append(OhlcBar(day, *values))
        prev_date = day
    return OhlcSeries(market=market, bars=tuple(bars))


def serialize_csv(series: OhlcSeries) -> str:
    """Render a series back to CSV text (round-trips through parse_csv)."""
    out = [CSV_HEADER]
    for b in series.bars:
        out.append(f"{b.date.isoformat()},{b.open!r},{b.high!r},{b.low!r},{b.close!r}")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# volatility (log returns, unbiased variance)
# ---------------------------------------------------------------------------


def volatility(series: OhlcSeries, price_field: str = "close", period_days: int = 252) -> VolatilityStats:
    """Sample volatility of day-over-day log returns of one price field.

    r(t) = ln(P(t) / P(t-1)); variance is the unbiased (N-1) sample variance
    of the returns; the periodized figure scales the daily one by
    sqrt(period_days).
    """
    if not isinstance(period_days, int) or period_days <= 0:
        raise OhlcError(f"period_days must be a positive integer, got {period_days!r}")
    if len(series) < 3:
        raise OhlcError(f"volatility needs at least 3 bars, got {len(series)}")
    prices = series.prices(price_field)
    returns = np.log(prices[1:] / prices[:-1])
    variance = float(returns.var(ddof=1))
    variance = max(variance, 0.0)
    daily = math.sqrt(variance)
    return VolatilityStats(
        n_returns=int(returns.size),
        mean_return=float(returns.mean()),
        variance=variance,
        daily_volatility=daily,
        periodized_volatility=daily * math.sqrt(period_days),
        period_days=period_days,
    )
