"""Band indicators against brute-force per-index oracles and hand values."""

from __future__ import annotations

import datetime as dt
import math

import numpy as np
import pytest

from opentrend.indicators import (
    BandTriple,
    IndicatorParams,
    atr,
    bollinger,
    channel_arrays,
    donchian,
    ema,
    keltner,
    sma,
    true_range,
)
from opentrend.ohlc import OhlcBar, OhlcSeries
from opentrend.synth import GenSpec, generate

# ---------------------------------------------------------------------------
# brute-force oracles (independent per-index recomputation)
# ---------------------------------------------------------------------------


def oracle_donchian(series, n, t):
    highs = [b.high for b in series.bars[t - n + 1 : t + 1]]
    lows = [b.low for b in series.bars[t - n + 1 : t + 1]]
    upper, lower = max(highs), min(lows)
    return upper, lower, (upper + lower) / 2.0


def oracle_bollinger(series, n, k, t):
    window = [b.close for b in series.bars[t - n + 1 : t + 1]]
    middle = sum(window) / n
    sigma = math.sqrt(sum((c - middle) ** 2 for c in window) / n)
    return middle + k * sigma, middle - k * sigma, middle


def oracle_ema(closes, n, t):
    """Closed-form EMA: geometric sum over values after the SMA seed."""
    alpha = 2.0 / (n + 1)
    seed = sum(closes[:n]) / n
    if t == n - 1:
        return seed
    total = seed * (1.0 - alpha) ** (t - n + 1)
    for i in range(n, t + 1):
        total += alpha * (1.0 - alpha) ** (t - i) * closes[i]
    return total


def oracle_true_range(series, t):
    b = series.bars[t]
    if t == 0:
        return b.high - b.low
    prev = series.bars[t - 1].close
    return max(b.high - b.low, abs(b.high - prev), abs(b.low - prev))


def oracle_keltner(series, n, k, t):
    closes = [b.close for b in series.bars]
    middle = oracle_ema(closes, n, t)
    avg_tr = sum(oracle_true_range(series, i) for i in range(t - n + 1, t + 1)) / n
    return middle + k * avg_tr, middle - k * avg_tr, middle


def flat_series(closes, start=dt.date(2019, 4, 1)):
    bars = tuple(
        OhlcBar(start + dt.timedelta(days=i), c, c, c, c) for i, c in enumerate(closes)
    )
    return OhlcSeries(market="flat", bars=bars)


# ---------------------------------------------------------------------------
# scalar indicators
# ---------------------------------------------------------------------------


class TestSma:
    def test_hand_values(self):
        out = sma([1.0, 2.0, 3.0, 4.0], 2)
        assert np.isnan(out[0])
        np.testing.assert_allclose(out[1:], [1.5, 2.5, 3.5])

    def test_warmup_is_nan_not_zero(self):
        out = sma(np.arange(1.0, 31.0), 20)
        assert np.all(np.isnan(out[:19]))
        assert not np.any(out[:19] == 0.0)

    def test_window_equals_length(self):
        out = sma([2.0, 4.0, 6.0], 3)
        assert np.isnan(out[0]) and np.isnan(out[1])
        assert out[2] == pytest.approx(4.0)

    def test_too_short(self):
        with pytest.raises(ValueError, match="series too short"):
            sma([1.0], 2)


class TestEma:
    def test_hand_values(self):
        # n=2, alpha=2/3: seed 1.5 at index 1, then (2/3)*3 + (1/3)*1.5 = 2.5,
        # then (2/3)*4 + (1/3)*2.5 = 3.5
        out = ema([1.0, 2.0, 3.0, 4.0], 2)
        assert np.isnan(out[0])
        assert out[1] == pytest.approx(1.5)
        assert out[2] == pytest.approx(2.5)
        assert out[3] == pytest.approx(3.5)

    def test_recursion_identity(self, grw_series):
        closes = grw_series.prices("close")
        n = 20
        out = ema(closes, n)
        alpha = 2.0 / (n + 1)
        for t in range(n, len(closes)):
            assert out[t] == pytest.approx(alpha * closes[t] + (1 - alpha) * out[t - 1], rel=1e-12)

    def test_closed_form_oracle(self, grw_series):
        closes = list(grw_series.prices("close"))
        out = ema(closes, 20)
        for t in (19, 20, 47, 150, len(closes) - 1):
            assert out[t] == pytest.approx(oracle_ema(closes, 20, t), rel=1e-9)

    def test_constant_input_is_fixed_point(self):
        out = ema([7.0] * 40, 20)
        np.testing.assert_allclose(out[19:], 7.0)


class TestTrueRange:
    def test_first_day_is_high_minus_low(self):
        series = flat_series([100.0, 100.0])
        assert true_range(series)[0] == 0.0

    def test_gap_cases(self):
        start = dt.date(2019, 4, 1)
        bars = (
            OhlcBar(start, 100.0, 105.0, 98.0, 104.0),
            # gap up: high-prev_close dominates
            OhlcBar(start + dt.timedelta(days=1), 110.0, 112.0, 109.0, 111.0),
            # gap down: prev_close - low dominates
            OhlcBar(start + dt.timedelta(days=2), 100.0, 101.0, 99.0, 100.0),
        )
        series = OhlcSeries(market="g", bars=bars)
        tr = true_range(series)
        assert tr[0] == pytest.approx(7.0)
        assert tr[1] == pytest.approx(112.0 - 104.0)
        assert tr[2] == pytest.approx(111.0 - 99.0)

    def test_oracle(self, grw_series):
        tr = true_range(grw_series)
        for t in range(len(grw_series)):
            assert tr[t] == pytest.approx(oracle_true_range(grw_series, t), rel=1e-12)
        assert np.all(tr >= 0)

    def test_atr_is_window_mean(self, grw_series):
        n = 20
        out = atr(grw_series, n)
        tr = true_range(grw_series)
        assert np.all(np.isnan(out[: n - 1]))
        for t in (n - 1, 50, len(grw_series) - 1):
            assert out[t] == pytest.approx(tr[t - n + 1 : t + 1].mean(), rel=1e-12)


# ---------------------------------------------------------------------------
# channels
# ---------------------------------------------------------------------------


class TestChannels:
    N = 20

    def test_warmup_undefined(self, grw_series):
        for fn in (donchian, lambda s: bollinger(s), lambda s: keltner(s)):
            triples = fn(grw_series)
            assert all(t is None for t in triples[: self.N - 1])
            assert all(t is not None for t in triples[self.N - 1 :])

    def test_donchian_oracle(self, grw_series):
        triples = donchian(grw_series, self.N)
        for t in range(self.N - 1, len(grw_series)):
            upper, lower, middle = oracle_donchian(grw_series, self.N, t)
            assert triples[t].upper == pytest.approx(upper, rel=1e-12)
            assert triples[t].lower == pytest.approx(lower, rel=1e-12)
            assert triples[t].middle == pytest.approx(middle, rel=1e-12)

    def test_bollinger_oracle(self, grw_series):
        params = IndicatorParams(window_n=self.N, bollinger_k=2.0)
        triples = bollinger(grw_series, params)
        for t in range(self.N - 1, len(grw_series)):
            upper, lower, middle = oracle_bollinger(grw_series, self.N, 2.0, t)
            assert triples[t].upper == pytest.approx(upper, rel=1e-9)
            assert triples[t].lower == pytest.approx(lower, rel=1e-9)
            assert triples[t].middle == pytest.approx(middle, rel=1e-9)

    def test_keltner_oracle(self, grw_series):
        params = IndicatorParams(window_n=self.N, keltner_k=2.0)
        triples = keltner(grw_series, params)
        for t in range(self.N - 1, len(grw_series)):
            upper, lower, middle = oracle_keltner(grw_series, self.N, 2.0, t)
            assert triples[t].upper == pytest.approx(upper, rel=1e-9)
            assert triples[t].lower == pytest.approx(lower, rel=1e-9)
            assert triples[t].middle == pytest.approx(middle, rel=1e-9)

    def test_bollinger_hand_example(self):
        # window [1, 3]: mean 2, population sigma 1, k=2 -> bands (4, 2, 0)
        series = flat_series([1.0, 3.0])
        triples = bollinger(series, IndicatorParams(window_n=2, bollinger_k=2.0))
        assert triples[0] is None
        assert triples[1].upper == pytest.approx(4.0)
        assert triples[1].middle == pytest.approx(2.0)
        assert triples[1].lower == pytest.approx(0.0)

    def test_constant_series_collapses_all_channels(self):
        series = flat_series([50.0] * 30)
        for fn in (lambda: donchian(series, self.N), lambda: bollinger(series), lambda: keltner(series)):
            for triple in fn()[self.N - 1 :]:
                assert triple.upper == pytest.approx(50.0)
                assert triple.middle == pytest.approx(50.0)
                assert triple.lower == pytest.approx(50.0)

    def test_band_ordering_everywhere(self, grw_series):
        arrays = channel_arrays(grw_series, IndicatorParams())
        for prefix in ("dc", "bb", "kc"):
            u, l, m = arrays[f"{prefix}_u"], arrays[f"{prefix}_l"], arrays[f"{prefix}_m"]
            defined = ~np.isnan(u)
            assert np.all(l[defined] <= m[defined])
            assert np.all(m[defined] <= u[defined])

    def test_scale_equivariance(self, grw_series):
        scale = 7.5
        scaled = OhlcSeries(
            market="s",
            bars=tuple(
                OhlcBar(b.date, b.open * scale, b.high * scale, b.low * scale, b.close * scale)
                for b in grw_series.bars
            ),
        )
        base = channel_arrays(grw_series, IndicatorParams())
        big = channel_arrays(scaled, IndicatorParams())
        for key in base:
            np.testing.assert_allclose(big[key][19:], base[key][19:] * scale, rtol=1e-9)

    def test_keltner_k_zero_collapses_to_ema(self, grw_series):
        params = IndicatorParams(window_n=self.N, keltner_k=0.0)
        triples = keltner(grw_series, params)
        reference = ema(grw_series.prices("close"), self.N)
        for t in range(self.N - 1, len(grw_series)):
            assert triples[t].upper == pytest.approx(reference[t], rel=1e-12)
            assert triples[t].lower == pytest.approx(reference[t], rel=1e-12)

    def test_paper_literal_bollinger_needs_longer_warmup(self, grw_series):
        params = IndicatorParams(window_n=self.N, bollinger_paper_literal=True)
        triples = bollinger(grw_series, params)
        assert all(t is None for t in triples[: 2 * self.N - 2])
        assert all(t is not None for t in triples[2 * self.N - 2 :])

    def test_paper_literal_bollinger_oracle(self, grw_series):
        n = self.N
        closes = grw_series.prices("close")
        params = IndicatorParams(window_n=n, bollinger_paper_literal=True)
        triples = bollinger(grw_series, params)
        smas = sma(closes, n)
        for t in (2 * n - 2, 100, len(grw_series) - 1):
            middle = closes[t - n + 1 : t + 1].mean()
            sigma = math.sqrt(
                sum((closes[i] - smas[i]) ** 2 for i in range(t - n + 1, t + 1)) / n
            )
            assert triples[t].middle == pytest.approx(middle, rel=1e-9)
            assert triples[t].upper == pytest.approx(middle + 2 * sigma, rel=1e-9)

    def test_random_sweep_small(self):
        """Mini version of the big oracle sweep: 25 seeded series."""
        for seed in range(25):
            days = 40 + (seed * 13) % 80
            series = generate(GenSpec(kind="grw", days=days, seed=seed))
            dc = donchian(series, self.N)
            bb = bollinger(series)
            kc = keltner(series)
            for t in range(self.N - 1, days, 7):
                for got, oracle in (
                    (dc[t], oracle_donchian(series, self.N, t)),
                    (bb[t], oracle_bollinger(series, self.N, 2.0, t)),
                    (kc[t], oracle_keltner(series, self.N, 2.0, t)),
                ):
                    assert got.upper == pytest.approx(oracle[0], rel=1e-9)
                    assert got.lower == pytest.approx(oracle[1], rel=1e-9)
                    assert got.middle == pytest.approx(oracle[2], rel=1e-9)


class TestParams:
    def test_alpha(self):
        assert IndicatorParams(window_n=20).ema_alpha == pytest.approx(2.0 / 21.0)

    def test_bad_window(self):
        with pytest.raises(ValueError, match="window_n"):
            IndicatorParams(window_n=0)

    def test_negative_k(self):
        with pytest.raises(ValueError, match="keltner_k"):
            IndicatorParams(keltner_k=-1.0)

    def test_band_triple_ordering_enforced(self):
        with pytest.raises(ValueError, match="band ordering"):
            BandTriple(kind="donchian", upper=1.0, middle=2.0, lower=0.0)

    def test_band_kind_checked(self):
        with pytest.raises(ValueError, match="unknown band kind"):
            BandTriple(kind="fibonacci", upper=2.0, middle=1.0, lower=0.0)
