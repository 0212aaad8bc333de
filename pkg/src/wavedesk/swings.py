"""Zigzag swing detection over candle highs and lows."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .exceptions import EmptyInputError, ValidationError
from .market_data import CandleSeries, Interval

DEFAULT_THRESHOLDS = {Interval.DAILY: 0.02, Interval.HOURLY: 0.005}


class SwingKind(str, Enum):
    HIGH = "High"
    LOW = "Low"


@dataclass(frozen=True)
class SwingPoint:
    """A pivot at ``candle_index``.

    ``confirmed_at`` is the first candle at which the reversal filter proved
    the pivot; it is ``None`` for the provisional last endpoint.
    """

    candle_index: int
    price: float
    kind: SwingKind
    confirmed_at: int | None = None

    @property
    def is_high(self) -> bool:
        return self.kind is SwingKind.HIGH


@dataclass(frozen=True)
class SwingSequence:
    points: tuple[SwingPoint, ...]
    threshold: float

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        for a, b in zip(self.points, self.points[1:]):
            if a.kind == b.kind:
                raise ValidationError("swing kinds must alternate")
            if b.candle_index <= a.candle_index:
                raise ValidationError("swing candle indices must be strictly increasing")

    def __len__(self):
        return len(self.points)

    def __getitem__(self, index):
        return self.points[index]

    def __iter__(self):
        return iter(self.points)

    @property
    def confirmed(self) -> tuple[SwingPoint, ...]:
        return tuple(p for p in self.points if p.confirmed_at is not None)

    def interior_count(self) -> int:
        return max(0, len(self.points) - 2)


def default_threshold(interval: Interval) -> float:
    return DEFAULT_THRESHOLDS[Interval.parse(interval)]


def detect_swings(series: CandleSeries, threshold: float) -> SwingSequence:
    """Reduce ``series`` to alternating swing highs and lows.

    A pivot is the extreme high (or low) reached before price reverses by at
    least ``threshold`` relative to that extreme. Highs are taken from candle
    highs and lows from candle lows; equal extremes keep the earlier candle.
    The last, still-running extreme is appended unconfirmed. A series that
    never moves by ``threshold`` yields an empty sequence.
    """
    if len(series) == 0:
        raise EmptyInputError("cannot detect swings in an empty series")
    if not 0 < threshold < 1:
        raise ValueError("threshold must lie in (0, 1)")
    highs = series.highs
    lows = series.lows
    n = len(series)
    up_factor = 1.0 + threshold
    down_factor = 1.0 - threshold
    points: list[SwingPoint] = []

    # Undetermined phase: track both extremes until one is proven.
    hi_i = lo_i = 0
    trend = 0
    i = 1
    while i < n:
        if highs[i] > highs[hi_i]:
            hi_i = i
        if lows[i] < lows[lo_i]:
            lo_i = i
        up = lo_i < i and highs[i] >= lows[lo_i] * up_factor
        down = hi_i < i and lows[i] <= highs[hi_i] * down_factor
        if up and (not down or lo_i <= hi_i):
            points.append(SwingPoint(lo_i, float(lows[lo_i]), SwingKind.LOW, i))
            trend = 1
            cand = lo_i + 1 + int(highs[lo_i + 1:i + 1].argmax())
            break
        if down:
            points.append(SwingPoint(hi_i, float(highs[hi_i]), SwingKind.HIGH, i))
            trend = -1
            cand = hi_i + 1 + int(lows[hi_i + 1:i + 1].argmin())
            break
        i += 1
    if trend == 0:
        return SwingSequence((), threshold)

    for i in range(i + 1, n):
        if trend == 1:
            if highs[i] > highs[cand]:
                cand = i
            elif lows[i] <= highs[cand] * down_factor:
                points.append(SwingPoint(cand, float(highs[cand]), SwingKind.HIGH, i))
                trend = -1
                cand = cand + 1 + int(lows[cand + 1:i + 1].argmin())
        else:
            if lows[i] < lows[cand]:
                cand = i
            elif highs[i] >= lows[cand] * up_factor:
                points.append(SwingPoint(cand, float(lows[cand]), SwingKind.LOW, i))
                trend = 1
                cand = cand + 1 + int(highs[cand + 1:i + 1].argmax())

    if trend == 1:
        points.append(SwingPoint(cand, float(highs[cand]), SwingKind.HIGH, None))
    else:
        points.append(SwingPoint(cand, float(lows[cand]), SwingKind.LOW, None))
    return SwingSequence(tuple(points), threshold)
