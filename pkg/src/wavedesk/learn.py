"""Backtester: tabular Q-learning over pattern outcomes, plus forecast adjustment."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Protocol, Sequence

import numpy as np

from .enums import Completeness, Direction, PatternKind, Signal
from .exceptions import InsufficientDataError
from .forecast import (
    DEFAULT_SYMMETRY_TOLERANCE,
    EvaluationOutcome,
    Forecast,
    Scenario,
    evaluate,
    make_forecast,
)
from .market_data import CandleSeries
from .swings import SwingSequence, default_threshold, detect_swings
from .waves import ImpulsePattern, WaveConfig, find_impulse

SCHEMA_VERSION = 1
DEFAULT_TREND_WINDOW = 20


class Action(str, Enum):
    LONG = "Long"
    SHORT = "Short"
    FLAT = "Flat"


ACTIONS = (Action.LONG, Action.SHORT, Action.FLAT)


class TrendBucket(str, Enum):
    ABOVE = "Above"
    BELOW = "Below"


@dataclass(frozen=True, order=True)
class StateKey:
    symbol: str
    pattern_kind: PatternKind
    direction: Direction
    fib_bucket: int
    trend_bucket: TrendBucket

    def __post_init__(self):
        object.__setattr__(self, "pattern_kind", PatternKind(self.pattern_kind))
        object.__setattr__(self, "direction", Direction(self.direction))
        object.__setattr__(self, "trend_bucket", TrendBucket(self.trend_bucket))
        if self.pattern_kind is PatternKind.CORRECTIVE_ABC:
            raise ValueError("state keys describe impulse patterns only")
        if not 0 <= self.fib_bucket <= 4:
            raise ValueError("fib_bucket must lie in [0, 4]")
        if not self.symbol:
            raise ValueError("symbol must be set")

    def to_dict(self) -> dict:
        return {"symbol": self.symbol, "pattern_kind": self.pattern_kind.value,
                "direction": self.direction.value, "fib_bucket": self.fib_bucket,
                "trend_bucket": self.trend_bucket.value}

    @classmethod
    def from_dict(cls, d: dict) -> "StateKey":
        return cls(d["symbol"], PatternKind(d["pattern_kind"]), Direction(d["direction"]),
                   int(d["fib_bucket"]), TrendBucket(d["trend_bucket"]))


@dataclass(frozen=True)
class TrainParams:
    alpha: float = 0.1
    gamma: float = 0.5
    epsilon: float = 0.1
    episodes: int = 1
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.alpha <= 1:
            raise ValueError("alpha must lie in (0, 1]")
        if not 0 <= self.gamma < 1:
            raise ValueError("gamma must lie in [0, 1)")
        if not 0 < self.epsilon <= 1:
            raise ValueError("epsilon must lie in (0, 1]")
        if self.episodes < 1:
            raise ValueError("episodes must be >= 1")


class QTable:
    """Action values and visit counts for Long, Short and Flat per state."""

    def __init__(self):
        self.values: dict[StateKey, list[float]] = {}
        self.counts: dict[StateKey, list[int]] = {}

    def row(self, state: StateKey) -> list[float]:
        return self.values.get(state, [0.0, 0.0, 0.0])

    def get(self, state: StateKey, action: Action) -> float:
        return self.row(state)[ACTIONS.index(Action(action))]

    def visits(self, state: StateKey, action: Action) -> int:
        return self.counts.get(state, [0, 0, 0])[ACTIONS.index(Action(action))]

    def best_action(self, state: StateKey) -> Action:
        row = self.row(state)
        return ACTIONS[int(np.argmax(row))]

    def states(self) -> list[StateKey]:
        return sorted(self.values)

    def copy(self) -> "QTable":
        out = QTable()
        out.values = {k: list(v) for k, v in self.values.items()}
        out.counts = {k: list(v) for k, v in self.counts.items()}
        return out


def q_update(q: QTable, state: StateKey, action: Action, reward: float,
             next_state: StateKey | None, params: TrainParams) -> QTable:
    """One Q-learning step, in place: Q += alpha * (r + gamma * max Q' - Q).

    ``next_state=None`` marks a terminal transition (no bootstrap term).
    """
    a = ACTIONS.index(Action(action))
    bootstrap = 0.0 if next_state is None else max(q.row(next_state))
    row = q.values.setdefault(state, [0.0, 0.0, 0.0])
    row[a] += params.alpha * (reward + params.gamma * bootstrap - row[a])
    q.counts.setdefault(state, [0, 0, 0])[a] += 1
    return q


@dataclass(frozen=True)
class KnowledgeRecord:
    key: StateKey
    samples: int
    hit_rate: float
    mean_forward_return: float
    q_values: tuple[float, float, float]
    trained_through: int
    schema_version: int = SCHEMA_VERSION

    def __post_init__(self):
        object.__setattr__(self, "q_values", tuple(float(v) for v in self.q_values))
        if not 0.0 <= self.hit_rate <= 1.0:
            raise ValueError("hit_rate must lie in [0, 1]")
        if self.samples < 0:
            raise ValueError("samples must be >= 0")
        if len(self.q_values) != 3 or not all(math.isfinite(v) for v in self.q_values):
            raise ValueError("q_values must be three finite numbers")

    @property
    def best_action(self) -> Action:
        return ACTIONS[int(np.argmax(self.q_values))]

    def to_dict(self) -> dict:
        return {"type": "knowledge", "schema_version": self.schema_version,
                "key": self.key.to_dict(), "samples": self.samples, "hit_rate": self.hit_rate,
                "mean_forward_return": self.mean_forward_return,
                "q_values": list(self.q_values), "trained_through": self.trained_through}

    @classmethod
    def from_dict(cls, d: dict) -> "KnowledgeRecord":
        return cls(StateKey.from_dict(d["key"]), int(d["samples"]), float(d["hit_rate"]),
                   float(d["mean_forward_return"]), tuple(d["q_values"]),
                   int(d["trained_through"]), int(d.get("schema_version", SCHEMA_VERSION)))


# ---------------------------------------------------------------------------
# History walk
# ---------------------------------------------------------------------------

def trend_bucket(series: CandleSeries, index: int, window: int = DEFAULT_TREND_WINDOW) -> TrendBucket:
    closes = series.closes[max(0, index - window + 1):index + 1]
    return TrendBucket.ABOVE if series.closes[index] >= float(np.mean(closes)) else TrendBucket.BELOW


def fib_bucket(score: float) -> int:
    return min(4, max(0, int(score * 5)))


def state_key(pattern: ImpulsePattern, series: CandleSeries, index: int,
              trend_window: int = DEFAULT_TREND_WINDOW, symbol: str | None = None) -> StateKey:
    return StateKey(symbol or series.symbol, pattern.kind, pattern.direction,
                    fib_bucket(pattern.fib.conformance_score),
                    trend_bucket(series, index, trend_window))


@dataclass(frozen=True)
class PatternSample:
    """One detected pattern with its forecast and, when measurable, its outcome."""

    pattern: ImpulsePattern
    forecast: Forecast
    key: StateKey
    outcome: EvaluationOutcome | None
    forward_return: float | None

    @property
    def excluded(self) -> bool:
        return self.outcome is None


def collect_samples(series: CandleSeries, config: WaveConfig | None = None, *,
                    threshold: float | None = None,
                    completeness: Iterable[Completeness] = (Completeness.INCOMPLETE4, Completeness.COMPLETE5),
                    symmetry_tolerance: float = DEFAULT_SYMMETRY_TOLERANCE,
                    horizon_mode: str = "candles", trend_window: int = DEFAULT_TREND_WINDOW,
                    swings: SwingSequence | None = None) -> list[PatternSample]:
    """Walk the series and issue a forecast for every impulse once it is observable.

    A pattern becomes observable when its last pivot is confirmed, so every
    forecast uses only candles up to its issue index. Samples are ordered by
    issue index, then by pattern start.
    """
    config = config or WaveConfig()
    if len(series) == 0:
        return []
    if threshold is None:
        threshold = default_threshold(series.interval)
    if swings is None:
        swings = detect_swings(series, threshold)
    closes = series.closes
    samples = []
    for comp in completeness:
        for pattern in find_impulse(swings, Completeness(comp), config):
            last = pattern.pivots[-1]
            if last.confirmed_at is None:
                continue
            forecast = make_forecast(pattern, series, issued_at=last.confirmed_at,
                                     horizon_mode=horizon_mode)
            i = forecast.issued_at_index
            try:
                outcome = evaluate(forecast, pattern, series, symmetry_tolerance=symmetry_tolerance,
                                   threshold=threshold)
            except InsufficientDataError:
                outcome = None
            end = i + forecast.horizon_candles
            fwd = math.log(closes[end] / closes[i]) if end < len(series) else None
            samples.append(PatternSample(pattern, forecast, state_key(pattern, series, i, trend_window),
                                         outcome, fwd))
    samples.sort(key=lambda s: (s.forecast.issued_at_index, s.pattern.start_index,
                                s.pattern.completeness.value))
    return samples


@dataclass
class TrainingResult:
    records: list[KnowledgeRecord]
    q_table: QTable
    episodes: int
    samples: int


def _reward(action: Action, forward_return: float) -> float:
    if action is Action.LONG:
        return forward_return
    if action is Action.SHORT:
        return -forward_return
    return 0.0


def train_q_table(samples: Sequence[PatternSample], params: TrainParams,
                  trained_through: int) -> TrainingResult:
    usable = [s for s in samples if s.outcome is not None and s.forward_return is not None]
    q = QTable()
    rng = np.random.default_rng(params.seed)
    for _ in range(params.episodes):
        for k, s in enumerate(usable):
            if rng.random() < params.epsilon:
                action = ACTIONS[int(rng.integers(len(ACTIONS)))]
            else:
                action = q.best_action(s.key)
            nxt = usable[k + 1].key if k + 1 < len(usable) else None
            q_update(q, s.key, action, _reward(action, s.forward_return), nxt, params)

    grouped: dict[StateKey, list[PatternSample]] = {}
    for s in usable:
        grouped.setdefault(s.key, []).append(s)
    records = []
    for key in sorted(grouped):
        group = grouped[key]
        hits = sum(1 for s in group if s.outcome.correct)
        records.append(KnowledgeRecord(
            key, len(group), hits / len(group),
            math.fsum(s.forward_return for s in group) / len(group),
            tuple(q.row(key)), trained_through))
    return TrainingResult(records, q, params.episodes if usable else 0, len(usable))


def train_backtester(series: CandleSeries, params: TrainParams, config: WaveConfig | None = None,
                     **sample_options) -> list[KnowledgeRecord]:
    """Learn per-state reliability and action values from the series' history.

    ``sample_options`` are forwarded to :func:`collect_samples` (threshold,
    symmetry tolerance, horizon mode, trend window).
    """
    if len(series) == 0:
        return []
    samples = collect_samples(series, config, **sample_options)
    return train_q_table(samples, params, int(series.candles[-1].timestamp)).records


# ---------------------------------------------------------------------------
# Forecast adjustment
# ---------------------------------------------------------------------------

class KnowledgeSource(Protocol):
    def lookup(self, key: StateKey) -> KnowledgeRecord | None: ...


class KnowledgeIndex:
    """In-memory newest-wins view over knowledge records."""

    def __init__(self, records: Iterable[KnowledgeRecord] = ()):
        self._by_key: dict[StateKey, KnowledgeRecord] = {}
        for r in records:
            self._by_key[r.key] = r

    def lookup(self, key: StateKey) -> KnowledgeRecord | None:
        return self._by_key.get(key)

    def __len__(self):
        return len(self._by_key)


def forecast_key(pattern: ImpulsePattern, forecast: Forecast, series: CandleSeries,
                 trend_window: int = DEFAULT_TREND_WINDOW, symbol: str | None = None) -> StateKey | None:
    """State key the backtester learned for this forecast's scenario, if any.

    Post-correction forecasts have no learned counterpart and get ``None``.
    """
    if forecast.scenario is Scenario.POST_CORRECTION:
        return None
    return state_key(pattern, series, forecast.issued_at_index, trend_window, symbol)


def adjust_forecast(forecast: Forecast, key: StateKey | None, kb: KnowledgeSource,
                    min_hit_rate: float = 0.5) -> Forecast:
    """Downgrade to Hold when history says the pattern is unreliable.

    The forecast is held if the record's hit rate is below ``min_hit_rate``
    or its best action trades against the signal. Missing records, a
    ``None`` key and Hold forecasts pass through unchanged.
    """
    if key is None or forecast.signal is Signal.HOLD:
        return forecast
    record = kb.lookup(key)
    if record is None:
        return forecast
    if record.hit_rate < min_hit_rate:
        return forecast.held(f"historical hit rate {record.hit_rate:.2f} below {min_hit_rate:.2f}")
    best = record.best_action
    if (forecast.signal is Signal.BUY and best is Action.SHORT) or \
            (forecast.signal is Signal.SELL and best is Action.LONG):
        return forecast.held(f"learned action {best.value} contradicts {forecast.signal.value}")
    return forecast
