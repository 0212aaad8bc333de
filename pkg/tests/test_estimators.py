import math

import numpy as np
import pytest
from sklearn.base import clone

from wavedesk.enums import Completeness, PatternKind, Signal
from wavedesk.estimators import SwingDetector, WaveBacktester, WavePatternDetector
from wavedesk.market_data import SynthSpec, regime_series, synth_series
from wavedesk.swings import detect_swings
from wavedesk.validation import check_fraction, check_positive_int, check_series


def _ohlc(series):
    return np.array([[c.open, c.high, c.low, c.close] for c in series])


def test_check_series_accepts_arrays_and_frames():
    s, _ = synth_series(SynthSpec(PatternKind.IMPULSE5), 0)
    arr = _ohlc(s)
    assert np.array_equal(check_series(arr).closes, s.closes)
    full = np.column_stack([s.timestamps, arr, np.ones(len(s))])
    assert list(check_series(full).timestamps) == list(s.timestamps)
    pd = pytest.importorskip("pandas")
    frame = pd.DataFrame(arr, columns=["Open", "High", "Low", "Close"])
    assert np.array_equal(check_series(frame).highs, s.highs)
    assert check_series(s) is s
    with pytest.raises(ValueError):
        check_series(np.ones((3, 2)))
    with pytest.raises(ValueError):
        check_series(np.ones((0, 4)))


def test_scalar_checks():
    assert check_fraction(0.5, "x") == 0.5
    with pytest.raises(ValueError):
        check_fraction(1.0, "x")
    with pytest.raises(TypeError):
        check_fraction("a", "x")
    assert check_positive_int(3, "n") == 3
    with pytest.raises(ValueError):
        check_positive_int(0, "n")


def test_swing_detector_matches_function():
    s, _ = synth_series(SynthSpec(PatternKind.IMPULSE5, noise=0.3), 2)
    det = SwingDetector().fit(s)
    assert det.threshold_ == 0.02
    assert det.transform(s) == detect_swings(s, 0.02)
    assert SwingDetector(threshold=0.05).fit_transform(s) == detect_swings(s, 0.05)


def test_params_and_clone():
    est = WaveBacktester(alpha=0.3, episodes=2)
    assert est.get_params()["alpha"] == 0.3
    twin = clone(est)
    assert twin.get_params() == est.get_params() and twin is not est
    est.set_params(gamma=0.2)
    assert est.gamma == 0.2


def test_unfitted_raises():
    from sklearn.exceptions import NotFittedError
    s, _ = synth_series(SynthSpec(PatternKind.IMPULSE5), 0)
    with pytest.raises(NotFittedError):
        WavePatternDetector().transform(s)


def test_pattern_detector_finds_annotation():
    s, ann = synth_series(SynthSpec(PatternKind.IMPULSE5, tail_candles=30), 0)
    det = WavePatternDetector(completeness=("Complete5",)).fit(s)
    pats = det.transform(s)
    assert [tuple(p.candle_index for p in pats[0].pivots)] == [ann[0].pivot_indices]
    forecasts = det.predict(s)
    assert forecasts and forecasts[0].signal is Signal.SELL


def test_backtester_fit_predict_score():
    series, _ = regime_series(40, seed=1)
    half = len(series) // 2
    train, test = series.slice(0, half), series.slice(half)
    bt = WaveBacktester(random_state=0).fit(train)
    assert bt.records_ and bt.n_samples_ > 0
    raw = WavePatternDetector().fit(test).predict(test)
    adjusted = bt.predict(test)
    assert len(raw) == len(adjusted)
    for r, a in zip(raw, adjusted):
        assert a.signal in (r.signal, Signal.HOLD)
    with_score = bt.score(test)
    without_score = WavePatternDetector().fit(test).score(test)
    assert 0.0 <= without_score <= 1.0 and 0.0 <= with_score <= 1.0
    assert with_score >= without_score
    assert not math.isnan(with_score)
