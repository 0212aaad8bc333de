"""scikit-learn style wrappers around the functional API.

Each estimator takes a candle series (or anything :func:`check_series`
accepts) as ``X`` and exposes ``get_params``/``set_params`` so it can be
cloned, grid-searched and placed in pipelines.
"""

from __future__ import annotations

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .enums import Completeness, Signal
from .forecast import Forecast
from .learn import (
    KnowledgeIndex,
    TrainParams,
    adjust_forecast,
    collect_samples,
    forecast_key,
    train_q_table,
)
from .swings import SwingSequence, default_threshold, detect_swings
from .validation import check_fraction, check_positive_int, check_series
from .waves import ImpulsePattern, WaveConfig, find_impulse


class SwingDetector(TransformerMixin, BaseEstimator):
    """Zigzag pivots. ``threshold=None`` picks the interval default at fit time."""

    def __init__(self, threshold=None):
        self.threshold = threshold

    def fit(self, X, y=None):
        series = check_series(X)
        self.threshold_ = (default_threshold(series.interval) if self.threshold is None
                           else check_fraction(self.threshold, "threshold"))
        self.n_candles_ = len(series)
        return self

    def transform(self, X) -> SwingSequence:
        check_is_fitted(self, "threshold_")
        return detect_swings(check_series(X), self.threshold_)


class WavePatternDetector(TransformerMixin, BaseEstimator):
    def __init__(self, threshold=None, completeness=("Incomplete4", "Complete5"), fib_tolerance=0.10,
                 require_w3_dominance=True, symmetry_tolerance=0.10, horizon_mode="candles"):
        self.threshold = threshold
        self.completeness = completeness
        self.fib_tolerance = fib_tolerance
        self.require_w3_dominance = require_w3_dominance
        self.symmetry_tolerance = symmetry_tolerance
        self.horizon_mode = horizon_mode

    def fit(self, X, y=None):
        series = check_series(X)
        self.threshold_ = (default_threshold(series.interval) if self.threshold is None
                           else check_fraction(self.threshold, "threshold"))
        self.completeness_ = tuple(Completeness(c) for c in self.completeness)
        self.wave_config_ = WaveConfig(self.fib_tolerance, self.require_w3_dominance)
        return self

    def _sample_options(self):
        return {"threshold": self.threshold_, "completeness": self.completeness_,
                "symmetry_tolerance": self.symmetry_tolerance, "horizon_mode": self.horizon_mode}

    def transform(self, X) -> list[ImpulsePattern]:
        """All rule-abiding impulse patterns, ordered by start then end."""
        check_is_fitted(self, "wave_config_")
        swings = detect_swings(check_series(X), self.threshold_)
        found = [p for c in self.completeness_ for p in find_impulse(swings, c, self.wave_config_)]
        return sorted(found, key=lambda p: (p.start_index, p.end_index))

    def predict(self, X) -> list[Forecast]:
        """One forecast per pattern, issued when its last pivot is confirmed."""
        check_is_fitted(self, "wave_config_")
        return [s.forecast for s in collect_samples(check_series(X), self.wave_config_,
                                                    **self._sample_options())]

    def score(self, X, y=None) -> float:
        check_is_fitted(self, "wave_config_")
        samples = [s for s in collect_samples(check_series(X), self.wave_config_, **self._sample_options())
                   if s.outcome is not None]
        if not samples:
            return float("nan")
        return sum(s.outcome.correct for s in samples) / len(samples)


class WaveBacktester(BaseEstimator):
    """Learns pattern reliability on a training series, then filters forecasts.

    ``predict`` returns forecasts after adjustment: unreliable ones come back
    as Hold. ``score`` is the accept/reject decision accuracy.
    """

    def __init__(self, threshold=None, alpha=0.1, gamma=0.5, epsilon=0.1, episodes=1,
                 random_state=0, min_hit_rate=0.5, fib_tolerance=0.10, require_w3_dominance=True,
                 symmetry_tolerance=0.10, horizon_mode="candles", trend_window=20):
        self.threshold = threshold
        self.alpha = alpha
        self.gamma = gamma
        self.epsilon = epsilon
        self.episodes = episodes
        self.random_state = random_state
        self.min_hit_rate = min_hit_rate
        self.fib_tolerance = fib_tolerance
        self.require_w3_dominance = require_w3_dominance
        self.symmetry_tolerance = symmetry_tolerance
        self.horizon_mode = horizon_mode
        self.trend_window = trend_window

    def _options(self, series):
        threshold = default_threshold(series.interval) if self.threshold is None else self.threshold
        return {"threshold": threshold, "symmetry_tolerance": self.symmetry_tolerance,
                "horizon_mode": self.horizon_mode, "trend_window": self.trend_window}

    def fit(self, X, y=None):
        series = check_series(X)
        check_positive_int(self.episodes, "episodes")
        params = TrainParams(self.alpha, self.gamma, self.epsilon, self.episodes, int(self.random_state or 0))
        self.wave_config_ = WaveConfig(self.fib_tolerance, self.require_w3_dominance)
        samples = collect_samples(series, self.wave_config_, **self._options(series))
        result = train_q_table(samples, params, int(series.candles[-1].timestamp))
        self.records_ = result.records
        self.q_table_ = result.q_table
        self.n_samples_ = result.samples
        self.symbol_ = series.symbol
        self._index = KnowledgeIndex(result.records)
        return self

    def _decisions(self, X):
        check_is_fitted(self, "records_")
        series = check_series(X, symbol=self.symbol_)
        out = []
        for s in collect_samples(series, self.wave_config_, **self._options(series)):
            key = forecast_key(s.pattern, s.forecast, series, self.trend_window, self.symbol_)
            out.append((s, adjust_forecast(s.forecast, key, self._index, self.min_hit_rate)))
        return out

    def predict(self, X) -> list[Forecast]:
        return [adjusted for _, adjusted in self._decisions(X)]

    def score(self, X, y=None) -> float:
        decided = [(s, a) for s, a in self._decisions(X) if s.outcome is not None]
        if not decided:
            return float("nan")
        hits = 0
        for s, adjusted in decided:
            rejected = s.forecast.signal is not Signal.HOLD and adjusted.signal is Signal.HOLD
            hits += int(s.outcome.correct != rejected)
        return hits / len(decided)
