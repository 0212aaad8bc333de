import json
import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wavedesk.enums import Direction, PatternKind
from wavedesk.exceptions import (DataLoadError, InvalidSpecError, ParseError,
                                 UnsupportedResampleError, ValidationError)
from wavedesk.market_data import (
    CASE_STUDY_PRICES, Candle, CandleSeries, InMemoryFetcher, Interval, LocalFileFetcher, SynthSpec,
    case_study_series, concat_series, parse_candles, random_walk_series, regime_series, resample,
    synth_series, to_csv, to_json, write_fixtures,
)
from wavedesk.config import PACKAGE_FIXTURES

HEADER = "timestamp,open,high,low,close,volume\n"


def test_single_row_maps_fields():
    s = parse_candles(HEADER + "1700000000,10,12,9,11,100\n", "1d")
    assert len(s) == 1
    assert s[0].high == 12 and s[0].low == 9 and s[0].volume == 100


def test_low_above_high_reports_row():
    with pytest.raises(ValidationError) as err:
        parse_candles(HEADER + "1700000000,10,12,13,11,100\n", "1d")
    assert err.value.row == 1


def test_non_numeric_field_is_parse_error():
    with pytest.raises(ParseError) as err:
        parse_candles(HEADER + "1700000000,10,12,9,11,100\n1700086400,x,12,9,11,1\n", "1d")
    assert err.value.row == 2


def test_missing_header_column():
    with pytest.raises(ParseError):
        parse_candles("timestamp,open,high,low,close\n1,1,1,1,1\n", "1d")


def test_rows_are_sorted_and_duplicates_rejected():
    text = HEADER + "1700086400,10,12,9,11,1\n1700000000,10,12,9,11,1\n"
    s = parse_candles(text, "1d")
    assert list(s.timestamps) == [1700000000, 1700086400]
    with pytest.raises(ValidationError):
        parse_candles(HEADER + "1700000000,10,12,9,11,1\n1700000000,10,12,9,11,1\n", "1d")


def test_spacing_below_interval_rejected():
    with pytest.raises(ValidationError):
        parse_candles(HEADER + "1700000000,10,12,9,11,1\n1700003600,10,12,9,11,1\n", "1d")


def test_json_document():
    doc = json.dumps([{"timestamp": 1700000000, "open": 1, "high": 2, "low": 0.5, "close": 1.5, "volume": 3}])
    assert parse_candles(doc, "1h")[0].close == 1.5


def test_bundled_apple_fixture_row_count():
    path = PACKAGE_FIXTURES / "aapl_daily.csv"
    # independent count: non-empty lines minus the header
    lines = [ln for ln in path.read_text().splitlines() if ln.strip()]
    s = LocalFileFetcher(PACKAGE_FIXTURES).load("AAPL", "1d")
    assert len(lines) - 1 == 1000
    assert len(s) == 1000


def test_fixture_files_match_generators(tmp_path):
    written = write_fixtures(tmp_path)
    for path in written:
        assert path.read_bytes() == (PACKAGE_FIXTURES / path.name).read_bytes(), path.name


@given(st.lists(st.tuples(st.floats(1, 1e4), st.floats(0, 0.2), st.floats(0, 0.2), st.floats(0, 1),
                          st.floats(0, 1e6)), min_size=1, max_size=30))
@settings(max_examples=60, deadline=None)
def test_csv_and_json_round_trip(rows):
    candles = []
    for t, (mid, up, down, frac, vol) in enumerate(rows):
        hi, lo = mid * (1 + up), mid * (1 - down)
        o = lo + frac * (hi - lo)
        candles.append(Candle(1_600_000_000 + t * 86_400, o, hi, lo, mid, vol))
    s = CandleSeries("RT", Interval.DAILY, tuple(candles))
    assert parse_candles(to_csv(s), "1d", "RT") == s
    assert parse_candles(to_json(s), "1d", "RT") == s


def _hourly(n, start=1_600_000_000 - 1_600_000_000 % 86_400, high_at=None):
    out = []
    for h in range(n):
        hi = 50.0 if h == high_at else 11.0
        out.append(Candle(start + h * 3600, 10.0, hi, 9.0, 10.5, float(h + 1)))
    return CandleSeries("H", Interval.HOURLY, tuple(out))


def test_resample_singleton():
    s = _hourly(1)
    d = resample(s, "1d")
    c, h = d[0], s[0]
    assert len(d) == 1 and (c.open, c.high, c.low, c.close, c.volume) == (h.open, h.high, h.low, h.close, h.volume)


def test_resample_max_high():
    d = resample(_hourly(24, high_at=7), "1d")
    assert len(d) == 1 and d[0].high == 50.0


def test_resample_two_days_volume_preserved():
    s = _hourly(48)
    d = resample(s, Interval.DAILY)
    assert len(d) == 2
    assert math.isclose(sum(c.volume for c in d), sum(float(h + 1) for h in range(48)))
    assert d[0].volume == sum(range(1, 25))


def test_resample_to_finer_rejected():
    with pytest.raises(UnsupportedResampleError):
        resample(parse_candles(HEADER + "1700000000,10,12,9,11,1\n", "1d"), "1h")


def test_synth_wave3_length_exact():
    spec = SynthSpec(PatternKind.IMPULSE5, Direction.UP, wave1_length=10.0, w3_extension=1.618)
    _, ann = synth_series(spec, 0)
    prices = spec.pivot_prices()
    assert prices[3] - prices[2] == pytest.approx(16.18, abs=1e-12)
    assert ann[0].pivot_indices == (0, 10, 20, 30, 40, 50)


def test_synth_deterministic():
    spec = SynthSpec(PatternKind.IMPULSE4, noise=0.4)
    a, _ = synth_series(spec, 9)
    b, _ = synth_series(spec, 9)
    assert to_csv(a) == to_csv(b)


def test_noisy_pivots_are_local_extremes():
    spec = SynthSpec(PatternKind.IMPULSE4, Direction.UP, noise=0.5)
    series, ann = synth_series(spec, 42)
    idx = ann[0].pivot_indices
    for k, i in enumerate(idx):
        lo, hi = max(0, i - 1), min(len(series), i + 2)
        neighbours = range(lo, hi)
        if k % 2 == 0:  # lows of an Up impulse
            assert all(series.lows[i] <= series.lows[j] for j in neighbours)
        else:
            assert all(series.highs[i] >= series.highs[j] for j in neighbours)


def test_synth_rejects_bad_counts():
    with pytest.raises(InvalidSpecError):
        synth_series(SynthSpec(PatternKind.IMPULSE5, candles_per_wave=(3, 3)), 0)


def test_case_study_levels():
    s = case_study_series()
    assert len(s) == 1000
    window = s.slice(len(s) - 365)
    assert float(window.closes[-1]) == CASE_STUDY_PRICES[-1]
    assert float(window.highs.max()) == 250.0


def test_fetchers():
    s = random_walk_series(30, 1, symbol="RW")
    f = InMemoryFetcher([s])
    assert f.load("rw", "1d") is s
    with pytest.raises(DataLoadError):
        f.load("RW", "1h")
    with pytest.raises(DataLoadError):
        LocalFileFetcher(Path("/nonexistent")).load("X", "1d")


def test_concat_keeps_spacing():
    a = random_walk_series(5, 1)
    b = random_walk_series(5, 2)
    c = concat_series([a, b])
    assert len(c) == 10
    assert np.all(np.diff(c.timestamps) == 86_400)


def test_regime_series_annotations_are_consistent():
    series, ann = regime_series(6, seed=4)
    for a in ann:
        assert a.pattern_kind is PatternKind.IMPULSE4
        assert max(a.pivot_indices) < len(series)
