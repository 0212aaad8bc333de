"""Forecasts derived from wave patterns and their correctness criteria."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .enums import Completeness, Direction, Signal
from .exceptions import InsufficientDataError, ValidationError
from .market_data import CandleSeries
from .swings import default_threshold
from .waves import CorrectivePattern, ImpulsePattern, Wave

HORIZON_FACTOR = 1.62
EXTENSION_RATIO = 1.618
DEFAULT_SYMMETRY_TOLERANCE = 0.10


class Scenario(str, Enum):
    CONTINUATION = "continuation"  # 1-2-3-4, fifth wave expected
    REVERSAL = "reversal"  # 1-2-3-4-5, wave A expected
    POST_CORRECTION = "post-correction"  # 1-2-3-4-5 + A-B-C, new advance beyond wave 5


class Criterion(str, Enum):
    INCOMPLETE4_MEAN = "Incomplete4Mean"
    COMPLETE5_SYMMETRY = "Complete5Symmetry"


@dataclass(frozen=True)
class Forecast:
    pattern_id: str
    direction: Direction
    signal: Signal
    entry: float
    primary_target: float
    secondary_target: float | None
    stop_loss: float
    horizon_candles: int
    issued_at_index: int
    scenario: Scenario = Scenario.CONTINUATION
    note: str = ""

    def __post_init__(self):
        if self.horizon_candles < 1:
            raise ValidationError("horizon_candles must be >= 1")
        if self.signal is Signal.BUY and not (self.stop_loss < self.entry < self.primary_target):
            raise ValidationError("Buy needs stop_loss < entry < primary_target")
        if self.signal is Signal.SELL and not (self.stop_loss > self.entry > self.primary_target):
            raise ValidationError("Sell needs stop_loss > entry > primary_target")

    @property
    def actionable(self) -> bool:
        return self.signal is not Signal.HOLD

    def held(self, note: str) -> "Forecast":
        return replace(self, signal=Signal.HOLD, note=note)


@dataclass(frozen=True)
class EvaluationOutcome:
    correct: bool
    metric: float
    criterion: Criterion

    def __post_init__(self):
        if not math.isfinite(self.metric):
            raise ValidationError("metric must be finite")


def horizon(wave1: Wave, *, mode: str = "candles", series: CandleSeries | None = None) -> int:
    """Forecast horizon ``n`` from the first wave, rounded half up, at least 1.

    ``mode="candles"`` scales the wave's duration. ``mode="price"`` scales its
    price length and converts it to candles with the mean candle range over
    the wave, which needs ``series``.
    """
    if wave1.duration < 1:
        raise ValidationError("wave 1 must last at least one candle")
    if mode == "candles":
        raw = HORIZON_FACTOR * wave1.duration
    elif mode == "price":
        if series is None:
            raise ValueError("price-mode horizon needs the candle series")
        a, b = wave1.start.candle_index, wave1.end.candle_index + 1
        mean_range = float(np.mean(series.highs[a:b] - series.lows[a:b]))
        if mean_range <= 0:
            raw = HORIZON_FACTOR * wave1.duration
        else:
            raw = HORIZON_FACTOR * wave1.price_length / mean_range
    else:
        raise ValueError(f"unknown horizon mode {mode!r}")
    return max(1, math.floor(raw + 0.5))


def _issue_index(pattern, series: CandleSeries, issued_at: int | None) -> int:
    last = pattern.pivots[-1]
    if last.candle_index >= len(series):
        raise InsufficientDataError("pattern ends beyond the series")
    if issued_at is None:
        if last.confirmed_at is not None:
            issued_at = last.confirmed_at
        elif last.candle_index == len(series) - 1:
            raise InsufficientDataError("final pivot is still forming on the last candle")
        else:
            issued_at = last.candle_index
    if not last.candle_index <= issued_at < len(series):
        raise InsufficientDataError(f"issue index {issued_at} outside the observed series")
    return issued_at


def _build(signal, **fields) -> Forecast:
    try:
        return Forecast(signal=signal, **fields)
    except ValidationError as exc:
        # Levels already breached at issue time: keep them for reporting, stand aside.
        return Forecast(signal=Signal.HOLD, note=f"degenerate levels: {exc}", **fields)


def make_forecast(pattern, series: CandleSeries, *, corrective: CorrectivePattern | None = None,
                  issued_at: int | None = None, horizon_mode: str = "candles") -> Forecast:
    """Issue a forecast for an impulse, optionally followed by an A-B-C correction.

    ``pattern`` may also be an ``(impulse, corrective)`` tuple. Without an
    explicit ``issued_at`` the forecast is issued when the final pivot is
    confirmed, or on the last candle for the post-correction scenario.
    """
    if isinstance(pattern, tuple):
        pattern, corrective = pattern
    impulse: ImpulsePattern = pattern
    s = impulse.direction.sign
    w1 = impulse.waves[0]
    n = horizon(w1, mode=horizon_mode, series=series)
    closes = series.closes

    if corrective is not None:
        if impulse.completeness is not Completeness.COMPLETE5:
            raise ValueError("an A-B-C follow-up needs a complete 1-2-3-4-5 impulse")
        if corrective.pivots[0] != impulse.pivots[-1]:
            raise ValueError("corrective pattern must start at the impulse's last pivot")
        if issued_at is None:
            issued_at = len(series) - 1
        i = _issue_index(corrective, series, issued_at)
        a, b, c = corrective.waves
        return _build(
            Signal.BUY if s > 0 else Signal.SELL,
            pattern_id=f"{impulse.id}+{corrective.id}", direction=impulse.direction,
            entry=float(closes[i]), primary_target=impulse.waves[-1].end.price,
            secondary_target=b.end.price, stop_loss=c.end.price, horizon_candles=n,
            issued_at_index=i, scenario=Scenario.POST_CORRECTION)

    i = _issue_index(impulse, series, issued_at)
    entry = float(closes[i])
    if impulse.completeness is Completeness.INCOMPLETE4:
        w3, w4 = impulse.waves[2], impulse.waves[3]
        return _build(
            Signal.BUY if s > 0 else Signal.SELL,
            pattern_id=impulse.id, direction=impulse.direction, entry=entry,
            primary_target=w3.end.price + s * EXTENSION_RATIO * w1.price_length,
            secondary_target=None, stop_loss=w4.end.price, horizon_candles=n,
            issued_at_index=i, scenario=Scenario.CONTINUATION)

    w5 = impulse.waves[4]
    return _build(
        Signal.SELL if s > 0 else Signal.BUY,
        pattern_id=impulse.id, direction=impulse.direction.opposite, entry=entry,
        primary_target=w5.end.price - s * w5.price_length, secondary_target=None,
        stop_loss=w5.end.price, horizon_candles=n, issued_at_index=i,
        scenario=Scenario.REVERSAL)


def evaluate_incomplete(forecast: Forecast, series: CandleSeries) -> EvaluationOutcome:
    """Mean of the next ``n`` closes versus the close at issue; ties are wrong."""
    i, n = forecast.issued_at_index, forecast.horizon_candles
    if i + n >= len(series):
        raise InsufficientDataError(f"need {n} candles after index {i}, have {len(series) - i - 1}")
    closes = series.closes
    base = float(closes[i])
    # fsum is correctly rounded, so the sign (and an exact tie) survives
    window = [float(c) for c in closes[i + 1:i + n + 1]]
    diff = math.fsum(window + [-base] * n)
    correct = diff > 0 if forecast.direction is Direction.UP else diff < 0
    return EvaluationOutcome(correct, base + diff / n, Criterion.INCOMPLETE4_MEAN)


def _first_leg_after(series: CandleSeries, start: int, anchor: float, sign: int,
                     threshold: float) -> float:
    """Trend-oriented length of the first leg leaving the pivot at ``start``.

    The leg starts at ``anchor`` itself, so the pivot candle's own opposite
    wick cannot pose as a swing. Trading past the anchor first returns the
    positive excess; a confirmed counter move returns minus its length.
    """
    highs, lows = series.highs, series.lows
    n = len(series)
    cand = None
    for i in range(start + 1, n):
        if cand is None:
            if sign > 0 and highs[i] > anchor:
                return float(highs[i] - anchor)
            if sign < 0 and lows[i] < anchor:
                return float(anchor - lows[i])
            if (sign > 0 and lows[i] <= anchor * (1 - threshold)) or \
                    (sign < 0 and highs[i] >= anchor * (1 + threshold)):
                cand = i
            continue
        if sign > 0:
            if lows[i] < lows[cand]:
                cand = i
            elif highs[i] >= lows[cand] * (1 + threshold):
                return -float(anchor - lows[cand])
        else:
            if highs[i] > highs[cand]:
                cand = i
            elif lows[i] <= highs[cand] * (1 - threshold):
                return -float(highs[cand] - anchor)
    if cand is None:
        raise InsufficientDataError("no swing after wave 5 yet")
    raise InsufficientDataError("wave A has not completed")


def evaluate_complete(pattern: ImpulsePattern, series: CandleSeries,
                      tolerance: float = DEFAULT_SYMMETRY_TOLERANCE,
                      threshold: float | None = None) -> EvaluationOutcome:
    """Compare the first swing after wave 5 with wave 5 itself.

    Correct when that swing runs against the impulse and its price length is
    within ``tolerance * |W5|`` of ``|W5|``. The swing is traced from the
    wave-5 pivot with the zigzag rule (``threshold``, defaulting to the
    interval's default): trading beyond the pivot first means the trend
    carried on, which is incorrect.
    """
    if pattern.completeness is not Completeness.COMPLETE5:
        raise ValueError("symmetry criterion applies to complete 1-2-3-4-5 patterns")
    w5 = pattern.waves[4]
    start = w5.end.candle_index
    if start >= len(series) - 1:
        raise InsufficientDataError("no candles after wave 5")
    if threshold is None:
        threshold = default_threshold(series.interval)
    leg = _first_leg_after(series, start, w5.end.price, pattern.direction.sign, threshold)
    metric = abs(leg) / w5.price_length
    if leg > 0:
        return EvaluationOutcome(False, metric, Criterion.COMPLETE5_SYMMETRY)
    correct = abs(abs(leg) - w5.price_length) <= tolerance * w5.price_length
    return EvaluationOutcome(correct, metric, Criterion.COMPLETE5_SYMMETRY)


def evaluate(forecast: Forecast, pattern: ImpulsePattern, series: CandleSeries, *,
             symmetry_tolerance: float = DEFAULT_SYMMETRY_TOLERANCE,
             threshold: float | None = None) -> EvaluationOutcome:
    """Apply the criterion matching the pattern's completeness."""
    if pattern.completeness is Completeness.INCOMPLETE4:
        return evaluate_incomplete(forecast, series)
    return evaluate_complete(pattern, series, symmetry_tolerance, threshold)
