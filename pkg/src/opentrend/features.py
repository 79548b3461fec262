"""Per-day feature rows and masked feature matrices.

Each tradeable day yields 16 values in a fixed canonical order:

* intrinsic (4): the raw open/high/low/close,
* historical (9): Donchian, Bollinger and Keltner upper/lower/middle,
* nowcasting (3): intraday log ratios r_hi, r_lo, r_cl.

Rows exist only where every indicator is defined (index window_n-1 onward
for the default Bollinger mode), and every emitted value is finite.
"""

from __future__ import annotations

import datetime as dt
import math
from dataclasses import dataclass

import numpy as np

from opentrend.indicators import BOLLINGER, DONCHIAN, KELTNER, CHANNEL_COLUMNS, IndicatorParams, channel_arrays
from opentrend.ohlc import OhlcBar, OhlcSeries

INTRINSIC_COLUMNS = ("open", "high", "low", "close")
HISTORICAL_COLUMNS = CHANNEL_COLUMNS[DONCHIAN] + CHANNEL_COLUMNS[BOLLINGER] + CHANNEL_COLUMNS[KELTNER]
NOWCAST_COLUMNS = ("r_hi", "r_lo", "r_cl")
CANONICAL_COLUMNS = INTRINSIC_COLUMNS + HISTORICAL_COLUMNS + NOWCAST_COLUMNS

#: the four coarse feature sets used in reports
NAMED_FEATURE_SETS = ("INT", "INT+HIST", "INT+NOW", "INT+HIST+NOW")


@dataclass(frozen=True)
class NowcastFeatures:
    """Intraday shape of one bar as log ratios against its open."""

    r_hi: float
    r_lo: float
    r_cl: float

    def __post_init__(self) -> None:
        if not (self.r_hi >= 0.0 and self.r_lo <= 0.0 and self.r_lo <= self.r_cl <= self.r_hi):
            raise ValueError(
                f"nowcast ordering violated: r_hi={self.r_hi} r_lo={self.r_lo} r_cl={self.r_cl}"
            )


def nowcast(bar: OhlcBar) -> NowcastFeatures:
    """r_hi = ln(high/open), r_lo = ln(low/open), r_cl = ln(close/open)."""
    return NowcastFeatures(
        r_hi=math.log(bar.high / bar.open),
        r_lo=math.log(bar.low / bar.open),
        r_cl=math.log(bar.close / bar.open),
    )


@dataclass(frozen=True)
class FeatureRow:
    """All 16 feature values for one day, grouped by origin."""

    date: dt.date
    intrinsic: tuple[float, float, float, float]
    historical: tuple[float, ...]
    nowcast: tuple[float, float, float]

    def __post_init__(self) -> None:
        if len(self.historical) != 9:
            raise ValueError(f"expected 9 historical values, got {len(self.historical)}")
        values = self.intrinsic + self.historical + self.nowcast
        if not all(math.isfinite(v) for v in values):
            raise ValueError(f"non-finite feature value at {self.date.isoformat()}")

    @property
    def values(self) -> tuple[float, ...]:
        """The 16 values in canonical column order."""
        return self.intrinsic + self.historical + self.nowcast


@dataclass(frozen=True)
class FeatureSetMask:
    """Which feature groups (and which band channels) are active."""

    intrinsic: bool = True
    donchian: bool = False
    bollinger: bool = False
    keltner: bool = False
    nowcast: bool = False

    def __post_init__(self) -> None:
        if not any((self.intrinsic, self.donchian, self.bollinger, self.keltner, self.nowcast)):
            raise ValueError("empty feature set: at least one group must be active")

    @classmethod
    def from_name(cls, name: str) -> "FeatureSetMask":
        """Parse names like INT, INT+HIST, INT+NOW, INT+DC+BB, HIST+NOW."""
        flags = dict(intrinsic=False, donchian=False, bollinger=False, keltner=False, nowcast=False)
        parts = [p.strip().upper() for p in name.split("+")]
        for part in parts:
            if part == "INT":
                flags["intrinsic"] = True
            elif part == "HIST":
                flags["donchian"] = flags["bollinger"] = flags["keltner"] = True
            elif part == "DC":
                flags["donchian"] = True
            elif part == "BB":
                flags["bollinger"] = True
            elif part == "KC":
                flags["keltner"] = True
            elif part == "NOW":
                flags["nowcast"] = True
            else:
                raise ValueError(f"unknown feature set part {part!r} in {name!r}")
        return cls(**flags)

    @property
    def name(self) -> str:
        parts = []
        if self.intrinsic:
            parts.append("INT")
        if self.donchian and self.bollinger and self.keltner:
            parts.append("HIST")
        else:
            if self.donchian:
                parts.append("DC")
            if self.bollinger:
                parts.append("BB")
            if self.keltner:
                parts.append("KC")
        if self.nowcast:
            parts.append("NOW")
        return "+".join(parts)

    @property
    def columns(self) -> tuple[str, ...]:
        """Active column names in canonical order."""
        cols: list[str] = []
        if self.intrinsic:
            cols.extend(INTRINSIC_COLUMNS)
        if self.donchian:
            cols.extend(CHANNEL_COLUMNS[DONCHIAN])
        if self.bollinger:
            cols.extend(CHANNEL_COLUMNS[BOLLINGER])
        if self.keltner:
            cols.extend(CHANNEL_COLUMNS[KELTNER])
        if self.nowcast:
            cols.extend(NOWCAST_COLUMNS)
        return tuple(cols)


@dataclass(frozen=True, eq=False)
class FeatureMatrix:
    """A dense float64 design matrix plus its column names and row dates."""

    dates: tuple[dt.date, ...]
    columns: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self) -> None:
        if self.values.ndim != 2 or self.values.shape != (len(self.dates), len(self.columns)):
            raise ValueError(
                f"matrix shape {self.values.shape} does not match "
                f"{len(self.dates)} dates x {len(self.columns)} columns"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("non-finite value in feature matrix")

    @property
    def n_rows(self) -> int:
        return len(self.dates)


def assemble(series: OhlcSeries, params: IndicatorParams | None = None) -> list[FeatureRow]:
    """Build one FeatureRow per day from the first fully-defined index on.

    With the default Bollinger mode that is index window_n - 1, so a series
    of ``days`` bars yields ``days - window_n + 1`` rows (the final day
    included, even though it can never receive a label).
    """
    params = params or IndicatorParams()
    if len(series) < params.window_n:
        raise ValueError(
            f"series too short for feature assembly: {len(series)} bars, window {params.window_n}"
        )
    arrays = channel_arrays(series, params)
    stacked = np.vstack([arrays[c] for c in HISTORICAL_COLUMNS])
    defined = np.all(np.isfinite(stacked), axis=0)
    rows: list[FeatureRow] = []
    for t in np.nonzero(defined)[0]:
        bar = series.bars[t]
        nc = nowcast(bar)
        rows.append(
            FeatureRow(
                date=bar.date,
                intrinsic=(bar.open, bar.high, bar.low, bar.close),
                historical=tuple(float(stacked[j, t]) for j in range(len(HISTORICAL_COLUMNS))),
                nowcast=(nc.r_hi, nc.r_lo, nc.r_cl),
            )
        )
    if not rows:
        raise ValueError("no fully-defined feature rows (series too short for this indicator mode)")
    return rows


def select(rows: list[FeatureRow], mask: FeatureSetMask) -> FeatureMatrix:
    """Project feature rows onto the masked columns, keeping canonical order."""
    if not rows:
        raise ValueError("cannot select from an empty feature row list")
    cols = mask.columns
    full = np.array([r.values for r in rows], dtype=np.float64)
    index = [CANONICAL_COLUMNS.index(c) for c in cols]
    return FeatureMatrix(
        dates=tuple(r.date for r in rows),
        columns=cols,
        values=full[:, index],
    )


def export_csv(matrix: FeatureMatrix, labels: dict[str, np.ndarray] | None = None) -> str:
    """Feature matrix as CSV text; optional label columns are joined on the right.

    Label vectors are one element shorter than the matrix (the final day has
    no next open), so the final row is dropped whenever labels are included.
    """
    header = ("date",) + matrix.columns
    values = matrix.values
    dates = matrix.dates
    label_cols: list[tuple[str, np.ndarray]] = []
    if labels is not None:
        for name, vec in labels.items():
            if len(vec) != matrix.n_rows - 1:
                raise ValueError(
                    f"label column {name!r} has {len(vec)} values, expected {matrix.n_rows - 1}"
                )
            label_cols.append((name, np.asarray(vec)))
        header = header + tuple(name for name, _ in label_cols)
        values = values[:-1]
        dates = dates[:-1]
    lines = [",".join(header)]
    for i, day in enumerate(dates):
        cells = [day.isoformat()] + [repr(float(v)) for v in values[i]]
        cells.extend(str(int(vec[i])) for _, vec in label_cols)
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"
