"""OHLCV candle types, ingestion, resampling and synthetic series generation.

All synthetic data used by tests, fixtures and the experiment harness is built
here so that every generator shares one seeded, deterministic code path.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from pathlib import Path
from typing import Iterable, Protocol, Sequence

import numpy as np

from .enums import Direction, PatternKind
from .exceptions import (
    DataLoadError,
    InvalidSpecError,
    ParseError,
    UnsupportedResampleError,
    ValidationError,
)

COLUMNS = ("timestamp", "open", "high", "low", "close", "volume")
DEFAULT_START = 1_577_836_800  # 2020-01-01T00:00:00Z


class Interval(str, Enum):
    HOURLY = "1h"
    DAILY = "1d"

    @property
    def seconds(self) -> int:
        return 3600 if self is Interval.HOURLY else 86400

    @property
    def label(self) -> str:
        return "hourly" if self is Interval.HOURLY else "daily"

    @classmethod
    def parse(cls, value: "str | Interval") -> "Interval":
        if isinstance(value, Interval):
            return value
        key = str(value).strip().lower()
        aliases = {"1h": cls.HOURLY, "hourly": cls.HOURLY, "h": cls.HOURLY,
                   "1d": cls.DAILY, "daily": cls.DAILY, "d": cls.DAILY}
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown interval {value!r}") from None


@dataclass(frozen=True)
class Candle:
    timestamp: int
    open: float
    high: float
    low: float
    close: float
    volume: float = 0.0

    def __post_init__(self):
        prices = (self.open, self.high, self.low, self.close)
        if not all(math.isfinite(p) and p > 0 for p in prices):
            raise ValidationError(f"candle {self.timestamp}: prices must be finite and positive")
        if not (math.isfinite(self.volume) and self.volume >= 0):
            raise ValidationError(f"candle {self.timestamp}: volume must be non-negative")
        if self.low > self.high:
            raise ValidationError(f"candle {self.timestamp}: low {self.low} > high {self.high}")
        if self.low > min(self.open, self.close) or self.high < max(self.open, self.close):
            raise ValidationError(f"candle {self.timestamp}: open/close outside [low, high]")


@dataclass(frozen=True)
class CandleSeries:
    """Immutable, time-ordered candles for one symbol at one interval."""

    symbol: str
    interval: Interval
    candles: tuple[Candle, ...]

    def __post_init__(self):
        object.__setattr__(self, "interval", Interval.parse(self.interval))
        object.__setattr__(self, "candles", tuple(self.candles))
        step = self.interval.seconds
        for i in range(1, len(self.candles)):
            gap = self.candles[i].timestamp - self.candles[i - 1].timestamp
            if gap <= 0:
                raise ValidationError(f"timestamps not strictly increasing at candle {i}")
            if gap < step:
                raise ValidationError(
                    f"candle {i} is {gap}s after its predecessor, below the {self.interval.value} spacing")

    def __len__(self):
        return len(self.candles)

    def __getitem__(self, index):
        return self.candles[index]

    def __iter__(self):
        return iter(self.candles)

    @cached_property
    def highs(self) -> np.ndarray:
        return np.array([c.high for c in self.candles], dtype=float)

    @cached_property
    def lows(self) -> np.ndarray:
        return np.array([c.low for c in self.candles], dtype=float)

    @cached_property
    def closes(self) -> np.ndarray:
        return np.array([c.close for c in self.candles], dtype=float)

    @cached_property
    def timestamps(self) -> np.ndarray:
        return np.array([c.timestamp for c in self.candles], dtype=np.int64)

    def slice(self, start: int, stop: int | None = None) -> "CandleSeries":
        return CandleSeries(self.symbol, self.interval, self.candles[start:stop])

    def between(self, start_ts: int | None, end_ts: int | None) -> "CandleSeries":
        """Candles with ``start_ts <= timestamp < end_ts`` (either bound may be None)."""
        lo = -math.inf if start_ts is None else start_ts
        hi = math.inf if end_ts is None else end_ts
        return CandleSeries(self.symbol, self.interval,
                            tuple(c for c in self.candles if lo <= c.timestamp < hi))

    def scaled(self, factor: float, offset: float = 0.0) -> "CandleSeries":
        """Affine price transform ``p * factor + offset``; volumes untouched."""
        return CandleSeries(self.symbol, self.interval, tuple(
            Candle(c.timestamp, c.open * factor + offset, c.high * factor + offset,
                   c.low * factor + offset, c.close * factor + offset, c.volume)
            for c in self.candles))


# ---------------------------------------------------------------------------
# Ingestion and serialization
# ---------------------------------------------------------------------------

def _number(raw, name, row):
    try:
        value = float(raw)
    except (TypeError, ValueError):
        raise ParseError(f"{name} value {raw!r} is not a number", row=row) from None
    if not math.isfinite(value):
        raise ParseError(f"{name} value {raw!r} is not finite", row=row)
    return value


def _timestamp(raw, row):
    value = _number(raw, "timestamp", row)
    if value != int(value):
        raise ParseError(f"timestamp {raw!r} is not whole seconds", row=row)
    return int(value)


def _build(records: Iterable[tuple[int, dict]], symbol: str, interval: Interval) -> CandleSeries:
    candles = []
    for row, rec in records:
        ts = _timestamp(rec["timestamp"], row)
        values = [_number(rec[k], k, row) for k in COLUMNS[1:]]
        try:
            candles.append((ts, row, Candle(ts, *values)))
        except ValidationError as exc:
            raise ValidationError(str(exc), row=row) from None
    candles.sort(key=lambda item: item[0])
    for (ts_a, _, _), (ts_b, row_b, _) in zip(candles, candles[1:]):
        if ts_a == ts_b:
            raise ValidationError(f"duplicate timestamp {ts_b}", row=row_b)
    return CandleSeries(symbol, interval, tuple(c for _, _, c in candles))


def parse_candles(text: str, interval: "Interval | str", symbol: str = "UNKNOWN") -> CandleSeries:
    """Parse a CSV or JSON candle document into a validated series.

    CSV needs the header ``timestamp,open,high,low,close,volume`` (any column
    order); JSON is an array of objects with the same keys. Rows may come in
    any time order and are sorted ascending.
    """
    interval = Interval.parse(interval)
    stripped = text.lstrip("﻿ \t\r\n")
    if stripped.startswith("["):
        try:
            data = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}") from None
        records = []
        for row, obj in enumerate(data, start=1):
            if not isinstance(obj, dict):
                raise ParseError("expected an object", row=row)
            missing = [k for k in COLUMNS if k not in obj]
            if missing:
                raise ParseError(f"missing keys {missing}", row=row)
            records.append((row, obj))
        return _build(records, symbol, interval)

    reader = csv.reader(io.StringIO(stripped))
    try:
        header = [h.strip().lower() for h in next(reader)]
    except StopIteration:
        raise ParseError("empty document") from None
    missing = [k for k in COLUMNS if k not in header]
    if missing:
        raise ParseError(f"header lacks columns {missing}")
    position = {k: header.index(k) for k in COLUMNS}
    records = []
    for row, cells in enumerate(reader, start=1):
        if not cells or all(not c.strip() for c in cells):
            continue
        if len(cells) != len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(cells)}", row=row)
        records.append((row, {k: cells[i].strip() for k, i in position.items()}))
    return _build(records, symbol, interval)


def _fmt(value: float) -> str:
    return repr(float(value))


def to_csv(series: CandleSeries) -> str:
    lines = [",".join(COLUMNS)]
    for c in series.candles:
        lines.append(",".join([str(c.timestamp), _fmt(c.open), _fmt(c.high), _fmt(c.low),
                               _fmt(c.close), _fmt(c.volume)]))
    return "\n".join(lines) + "\n"


def to_json(series: CandleSeries) -> str:
    return json.dumps([
        {"timestamp": c.timestamp, "open": c.open, "high": c.high, "low": c.low,
         "close": c.close, "volume": c.volume}
        for c in series.candles
    ], indent=None)


def read_candles(path: "str | Path", interval: "Interval | str", symbol: str | None = None) -> CandleSeries:
    path = Path(path)
    symbol = symbol or path.stem.split("_")[0].upper()
    return parse_candles(path.read_text(encoding="utf-8"), interval, symbol)


class Fetcher(Protocol):
    """Source of candle documents (symbol, interval, time range -> document)."""

    def fetch(self, symbol: str, interval: Interval, start: int | None = None,
              end: int | None = None) -> str: ...


class LocalFileFetcher:
    """Reads ``<symbol>_<daily|hourly>.csv`` (or ``.json``) from a directory."""

    def __init__(self, directory: "str | Path"):
        self.directory = Path(directory)

    def path_for(self, symbol: str, interval: Interval) -> Path:
        interval = Interval.parse(interval)
        for ext in (".csv", ".json"):
            candidate = self.directory / f"{symbol.lower()}_{interval.label}{ext}"
            if candidate.exists():
                return candidate
        raise DataLoadError(f"no data file for {symbol} ({interval.label}) in {self.directory}")

    def fetch(self, symbol, interval, start=None, end=None) -> str:
        path = self.path_for(symbol, interval)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise DataLoadError(f"cannot read {path}: {exc}") from exc
        if start is None and end is None:
            return text
        series = parse_candles(text, interval, symbol.upper()).between(start, end)
        return to_csv(series)

    def load(self, symbol: str, interval: "Interval | str", start: int | None = None,
             end: int | None = None) -> CandleSeries:
        interval = Interval.parse(interval)
        return parse_candles(self.fetch(symbol, interval, start, end), interval, symbol.upper())


# ---------------------------------------------------------------------------
# Resampling
# ---------------------------------------------------------------------------

def resample(series: CandleSeries, target: "Interval | str") -> CandleSeries:
    """Aggregate candles into coarser buckets (daily buckets are UTC dates)."""
    target = Interval.parse(target)
    if target.seconds < series.interval.seconds:
        raise UnsupportedResampleError(
            f"cannot resample {series.interval.value} candles to finer {target.value}")
    if target is series.interval:
        return series
    buckets: dict[int, list[Candle]] = {}
    for c in series.candles:
        buckets.setdefault(c.timestamp // target.seconds * target.seconds, []).append(c)
    out = []
    for start in sorted(buckets):
        group = buckets[start]
        out.append(Candle(
            start, group[0].open, max(c.high for c in group), min(c.low for c in group),
            group[-1].close, float(math.fsum(c.volume for c in group))))
    return CandleSeries(series.symbol, target, tuple(out))


# ---------------------------------------------------------------------------
# Synthetic generation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SynthAnnotation:
    pattern_kind: PatternKind
    pivot_indices: tuple[int, ...]
    direction: Direction

    def __post_init__(self):
        idx = self.pivot_indices
        if any(b <= a for a, b in zip(idx, idx[1:])) or (idx and idx[0] < 0):
            raise ValidationError("pivot indices must be strictly increasing and non-negative")


@dataclass(frozen=True)
class SynthSpec:
    """Recipe for one embedded wave pattern.

    Wave price lengths are derived from ``wave1_length`` through the ratio
    fields; for ``CORRECTIVE_ABC`` ``wave1_length`` is the length of wave A and
    ``direction`` is the direction of the correction. ``candles_per_wave`` is
    either one count for every wave or one count per wave. ``tail_candles``
    appends an unannotated follow-through leg of ``tail_ratio * wave1_length``:
    trend continuation after an Impulse4, reversal after Impulse5 or ABC.
    """

    pattern_kind: PatternKind
    direction: Direction = Direction.UP
    wave1_length: float = 10.0
    start_price: float = 100.0
    candles_per_wave: "int | tuple[int, ...]" = 10
    w2_retrace: float = 0.5
    w3_extension: float = 1.618
    w4_retrace: float = 0.382
    w5_ratio: float = 1.0
    b_retrace: float = 0.5
    c_ratio: float = 1.0
    noise: float = 0.0
    tail_candles: int = 0
    tail_ratio: float = 1.0
    interval: Interval = Interval.DAILY
    symbol: str = "SYNTH"
    start_timestamp: int = DEFAULT_START

    @property
    def n_waves(self) -> int:
        return {PatternKind.IMPULSE4: 4, PatternKind.IMPULSE5: 5, PatternKind.CORRECTIVE_ABC: 3}[
            PatternKind(self.pattern_kind)]

    def wave_counts(self) -> tuple[int, ...]:
        counts = self.candles_per_wave
        if isinstance(counts, int):
            counts = (counts,) * self.n_waves
        counts = tuple(int(c) for c in counts)
        if len(counts) != self.n_waves:
            raise InvalidSpecError(f"need {self.n_waves} candle counts, got {len(counts)}")
        if any(c < 1 for c in counts):
            raise InvalidSpecError("every wave needs at least one candle")
        return counts

    def pivot_prices(self) -> list[float]:
        """Analytic Fibonacci construction of the pivot prices."""
        s = Direction(self.direction).sign
        w1 = self.wave1_length
        p = [self.start_price]
        if PatternKind(self.pattern_kind) is PatternKind.CORRECTIVE_ABC:
            p.append(p[-1] + s * w1)
            p.append(p[-1] - s * self.b_retrace * w1)
            p.append(p[-1] + s * self.c_ratio * w1)
            return p
        w3 = self.w3_extension * w1
        p.append(p[-1] + s * w1)
        p.append(p[-1] - s * self.w2_retrace * w1)
        p.append(p[-1] + s * w3)
        p.append(p[-1] - s * self.w4_retrace * w3)
        if self.n_waves == 5:
            p.append(p[-1] + s * self.w5_ratio * w1)
        return p


def _wave_band(prices, pivots, t):
    """(low, high) price band of the wave containing candle ``t``."""
    for k in range(1, len(pivots)):
        if t <= pivots[k]:
            a, b = prices[k - 1], prices[k]
            return min(a, b), max(a, b)
    a, b = prices[-2], prices[-1]
    return min(a, b), max(a, b)


def render_legs(prices: Sequence[float], durations: Sequence[int], *, noise: float = 0.0,
                seed: int = 0, interval: "Interval | str" = Interval.DAILY, symbol: str = "SYNTH",
                start_timestamp: int = DEFAULT_START, base_volume: float = 1_000_000.0,
                ) -> tuple[CandleSeries, list[int]]:
    """Render a piecewise-linear pivot path as candles.

    ``prices[k]`` is reached at candle ``sum(durations[:k])``. Noise perturbs
    closes and wicks of non-pivot candles but is clipped to the price band of
    each leg, so every pivot stays a (non-strict) local extreme. Returns the
    series and the candle index of every pivot.
    """
    if len(prices) != len(durations) + 1:
        raise InvalidSpecError("need exactly one more price than durations")
    if any(d < 1 for d in durations):
        raise InvalidSpecError("every leg needs at least one candle")
    if any(not (p > 0) for p in prices):
        raise InvalidSpecError("pivot prices must be positive")
    interval = Interval.parse(interval)
    pivots = [0]
    for d in durations:
        pivots.append(pivots[-1] + int(d))
    n = pivots[-1] + 1
    path = np.empty(n)
    for k, d in enumerate(durations):
        a, b = pivots[k], pivots[k + 1]
        path[a:b + 1] = np.linspace(prices[k], prices[k + 1], d + 1)
    for k, i in enumerate(pivots):
        path[i] = prices[k]

    rng = np.random.default_rng(seed)
    close_noise = rng.standard_normal(n)
    wick_noise = np.abs(rng.standard_normal((n, 2)))
    vol_noise = rng.uniform(0.5, 1.5, n)
    pivot_set = set(pivots)

    bands = [_wave_band(prices, pivots, t) for t in range(n)]
    if noise > 0:
        for t in range(n):
            if t in pivot_set:
                continue
            lo, hi = bands[t]
            margin = 0.01 * (hi - lo)
            path[t] = min(max(path[t] + noise * close_noise[t], lo + margin), hi - margin)

    candles = []
    for t in range(n):
        close = float(path[t])
        open_ = float(path[t - 1]) if t else close
        lo, hi = bands[t]
        high = max(open_, close)
        low = min(open_, close)
        if noise > 0:
            high = min(high + 0.5 * noise * wick_noise[t, 0], hi)
            low = max(low - 0.5 * noise * wick_noise[t, 1], lo)
            high = max(high, open_, close)
            low = min(low, open_, close)
        candles.append(Candle(start_timestamp + t * interval.seconds, open_, float(high), float(low),
                              close, round(base_volume * float(vol_noise[t]), 2)))
    return CandleSeries(symbol, interval, tuple(candles)), pivots


def synth_series(spec: SynthSpec, seed: int) -> tuple[CandleSeries, list[SynthAnnotation]]:
    """Generate one embedded pattern plus optional follow-through leg.

    With ``spec.noise == 0`` pivot prices equal the analytic construction.
    """
    kind = PatternKind(spec.pattern_kind)
    direction = Direction(spec.direction)
    counts = spec.wave_counts()
    if spec.tail_candles < 0:
        raise InvalidSpecError("tail_candles must be >= 0")
    if spec.noise < 0:
        raise InvalidSpecError("noise must be >= 0")
    prices = spec.pivot_prices()
    durations = list(counts)
    if spec.tail_candles:
        # continuation for Impulse4, reversal otherwise
        last_leg_sign = direction.sign * (1 if len(prices) % 2 == 0 else -1)
        tail_sign = -last_leg_sign
        prices.append(prices[-1] + tail_sign * spec.tail_ratio * spec.wave1_length)
        durations.append(spec.tail_candles)
    series, pivots = render_legs(prices, durations, noise=spec.noise, seed=seed,
                                 interval=spec.interval, symbol=spec.symbol,
                                 start_timestamp=spec.start_timestamp)
    n_pivots = spec.n_waves + 1
    return series, [SynthAnnotation(kind, tuple(pivots[:n_pivots]), direction)]


def random_walk_series(n: int, seed: int, *, start_price: float = 100.0, volatility: float = 0.015,
                       drift: float = 0.0, interval: "Interval | str" = Interval.DAILY,
                       symbol: str = "RW", start_timestamp: int = DEFAULT_START) -> CandleSeries:
    """Geometric random walk with open = previous close and random wicks."""
    interval = Interval.parse(interval)
    rng = np.random.default_rng(seed)
    log_ret = drift + volatility * rng.standard_normal(n)
    closes = start_price * np.exp(np.cumsum(log_ret))
    opens = np.concatenate([[start_price], closes[:-1]])
    wicks = np.abs(rng.standard_normal((n, 2))) * volatility * 0.5
    vols = rng.uniform(5e5, 1.5e6, n)
    candles = []
    for t in range(n):
        o, c = float(opens[t]), float(closes[t])
        candles.append(Candle(start_timestamp + t * interval.seconds, o,
                              max(o, c) * (1 + wicks[t, 0]), min(o, c) * (1 - wicks[t, 1]), c,
                              round(float(vols[t]), 2)))
    return CandleSeries(symbol, interval, tuple(candles))


def concat_series(parts: Sequence[CandleSeries], symbol: str | None = None) -> CandleSeries:
    """Join series end to end with contiguous timestamps; prices are kept as given."""
    if not parts:
        raise InvalidSpecError("nothing to concatenate")
    interval = parts[0].interval
    start = parts[0].candles[0].timestamp
    out = []
    for part in parts:
        for c in part.candles:
            out.append(Candle(start + len(out) * interval.seconds, c.open, c.high, c.low,
                              c.close, c.volume))
    return CandleSeries(symbol or parts[0].symbol, interval, tuple(out))


class InMemoryFetcher:
    """Fetcher over series already in memory, keyed by (symbol, interval)."""

    def __init__(self, series: Iterable[CandleSeries] = ()):
        self._data = {(s.symbol.upper(), s.interval): s for s in series}

    def add(self, series: CandleSeries) -> None:
        self._data[(series.symbol.upper(), series.interval)] = series

    def load(self, symbol, interval, start=None, end=None) -> CandleSeries:
        interval = Interval.parse(interval)
        try:
            series = self._data[(symbol.upper(), interval)]
        except KeyError:
            raise DataLoadError(f"no {interval.label} data for {symbol}") from None
        return series.between(start, end) if (start is not None or end is not None) else series

    def fetch(self, symbol, interval, start=None, end=None) -> str:
        return to_csv(self.load(symbol, interval, start, end))


# ---------------------------------------------------------------------------
# Bundled fixtures
# ---------------------------------------------------------------------------

MARKET_SYMBOLS = {
    # symbol: (start price, daily volatility)
    "AMZN": (95.0, 0.021),
    "GOOG": (105.0, 0.018),
    "INTC": (45.0, 0.022),
    "CSCO": (48.0, 0.014),
    "ADBE": (420.0, 0.020),
    "META": (190.0, 0.024),
}

# Apple-shaped case study: 1-2-3-4-5 up to 250, A-B-C with B at 225, price back at 232.
CASE_STUDY_PRICES = (170.0, 200.0, 185.0, 233.54, 215.0, 250.0, 210.0, 225.0, 200.0, 232.0)
CASE_STUDY_DURATIONS = (40, 28, 62, 34, 48, 36, 22, 40, 54)
CASE_STUDY_HISTORY = 636


def case_study_series(seed: int = 7, symbol: str = "AAPL") -> CandleSeries:
    """Daily series whose final 365 candles hold the labelled case-study structure.

    Earlier candles are a seeded random walk rescaled to end where the
    structure starts; they serve as backtesting history.
    """
    walk = random_walk_series(CASE_STUDY_HISTORY, seed, start_price=120.0, volatility=0.016,
                              symbol=symbol)
    factor = CASE_STUDY_PRICES[0] / walk.candles[-1].close
    walk = walk.scaled(factor)
    case, _ = render_legs(CASE_STUDY_PRICES, CASE_STUDY_DURATIONS, noise=0.3, seed=seed + 1,
                          symbol=symbol)
    return concat_series([walk, case.slice(1)], symbol)


def market_series(symbol: str, interval: "Interval | str" = Interval.DAILY, n: int = 2000,
                  seed: int | None = None) -> CandleSeries:
    """Seeded random-walk stand-in for one of the bundled market symbols."""
    interval = Interval.parse(interval)
    price, vol = MARKET_SYMBOLS[symbol.upper()]
    if interval is Interval.HOURLY:
        vol = vol / 3.0
    if seed is None:
        seed = sum(ord(ch) for ch in symbol.upper()) * (1 if interval is Interval.DAILY else 7)
    return random_walk_series(n, seed, start_price=price, volatility=vol, interval=interval,
                              symbol=symbol.upper())


def regime_series(n_cycles: int, seed: int, *, p_unreliable: float = 0.5, symbol: str = "REGIME",
                  noise: float = 0.0, start_price: float = 100.0,
                  interval: "Interval | str" = Interval.DAILY) -> tuple[CandleSeries, list[SynthAnnotation]]:
    """Chain of 1-2-3-4 impulses with known follow-through.

    Up impulses are always followed by a long advance (the fifth wave).
    Down impulses, with probability ``p_unreliable``, show a short dip that
    confirms wave 4 and then a strong advance, i.e. the expected decline
    fails. Each cycle returns to ``start_price`` so prices stay bounded.
    """
    rng = np.random.default_rng(seed)
    p = start_price
    prices = [p]
    durations: list[int] = []
    annotations = []

    def leg(target: float, candles: int):
        prices.append(target)
        durations.append(candles)

    for k in range(n_cycles):
        down = rng.random() < p_unreliable
        # approach leg so the cycle opens on a pivot of the right kind
        if down:
            leg(0.85 * p, 15)
            leg(p, 15)
        elif k:
            leg(p, 20)
        s = -1 if down else 1
        w1 = 0.10 * p
        first = sum(durations)
        idx = [first]
        for move, d in zip((w1, -0.5 * w1, 1.618 * w1, -0.382 * 1.618 * w1), (10, 6, 16, 8)):
            leg(prices[-1] + s * move, d)
            idx.append(idx[-1] + d)
        annotations.append(SynthAnnotation(PatternKind.IMPULSE4, tuple(idx),
                                           Direction.DOWN if down else Direction.UP))
        if down:
            leg(prices[-1] * 0.97, 3)
            leg(prices[-1] + 0.25 * p, 30)
        else:
            leg(prices[-1] + w1, 30)
    series, _ = render_legs(prices, durations, noise=noise, seed=seed, interval=interval, symbol=symbol)
    return series, annotations


def write_fixtures(directory: "str | Path") -> list[Path]:
    """Regenerate every bundled fixture file deterministically."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []

    def put(name: str, series: CandleSeries):
        path = directory / name
        path.write_text(to_csv(series), encoding="utf-8")
        written.append(path)

    put("aapl_daily.csv", case_study_series())
    for symbol in MARKET_SYMBOLS:
        put(f"{symbol.lower()}_daily.csv", market_series(symbol, Interval.DAILY))
        put(f"{symbol.lower()}_hourly.csv", market_series(symbol, Interval.HOURLY))
    put("regime_daily.csv", regime_series(80, seed=11, symbol="REGIME")[0])
    return written
