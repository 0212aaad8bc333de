"""Impulse and corrective wave assembly, rule validation and Fibonacci scoring."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

from .enums import Completeness, Direction, PatternKind
from .exceptions import InvalidAnchorError, ValidationError
from .swings import SwingKind, SwingPoint, SwingSequence

PHI = 1.618
CANONICAL_RATIOS = (0.382, 0.5, 0.618, 1.0, 1.618, 2.618)
IMPULSE_LABELS = ("W1", "W2", "W3", "W4", "W5")
CORRECTIVE_LABELS = ("WA", "WB", "WC")


class WaveLabel(str, Enum):
    W1 = "W1"
    W2 = "W2"
    W3 = "W3"
    W4 = "W4"
    W5 = "W5"
    WA = "WA"
    WB = "WB"
    WC = "WC"

    @property
    def short(self) -> str:
        return self.value[1:]


@dataclass(frozen=True)
class WaveConfig:
    fib_tolerance: float = 0.10
    require_w3_dominance: bool = True
    canonical_ratios: tuple[float, ...] = CANONICAL_RATIOS

    def __post_init__(self):
        object.__setattr__(self, "canonical_ratios", tuple(float(r) for r in self.canonical_ratios))
        if not self.fib_tolerance > 0:
            raise ValueError("fib_tolerance must be positive")
        if not self.canonical_ratios:
            raise ValueError("canonical_ratios must not be empty")


@dataclass(frozen=True)
class Wave:
    label: WaveLabel
    start: SwingPoint
    end: SwingPoint

    def __post_init__(self):
        if self.duration < 1:
            raise ValidationError(f"{self.label.value}: duration must be >= 1 candle")
        if not self.price_length > 0:
            raise ValidationError(f"{self.label.value}: price length must be positive")

    @property
    def price_length(self) -> float:
        return abs(self.end.price - self.start.price)

    @property
    def duration(self) -> int:
        return self.end.candle_index - self.start.candle_index

    @property
    def rises(self) -> bool:
        return self.end.price > self.start.price


@dataclass(frozen=True)
class RuleReport:
    """Outcome of the hard wave rules.

    ``rule3_not_shortest`` is None for 1-2-3-4 patterns and ``w3_dominance``
    is None when the dominance filter is disabled.
    """

    rule2_no_full_retrace: bool
    rule3_not_shortest: bool | None
    rule4_no_overlap: bool
    w3_dominance: bool | None = None

    @property
    def all_hard_rules_pass(self) -> bool:
        flags = [self.rule2_no_full_retrace, self.rule4_no_overlap]
        flags += [f for f in (self.rule3_not_shortest, self.w3_dominance) if f is not None]
        return all(flags)


@dataclass(frozen=True)
class FibAssessment:
    ratio_w2_w1: float | None = None
    ratio_w4_w3: float | None = None
    ratio_w3_w1: float | None = None
    ratio_w5_w1: float | None = None
    ratio_wb_wa: float | None = None
    ratio_wc_wa: float | None = None
    conformance_score: float = 0.0
    proximity: tuple[float, ...] = ()
    phi: float = PHI

    def ratios(self) -> dict[str, float]:
        names = ("ratio_w2_w1", "ratio_w4_w3", "ratio_w3_w1", "ratio_w5_w1", "ratio_wb_wa", "ratio_wc_wa")
        return {n: getattr(self, n) for n in names if getattr(self, n) is not None}


@dataclass(frozen=True)
class ImpulsePattern:
    direction: Direction
    waves: tuple[Wave, ...]
    completeness: Completeness
    fib: FibAssessment = field(default_factory=FibAssessment)
    rules: RuleReport | None = None

    def __post_init__(self):
        object.__setattr__(self, "waves", tuple(self.waves))
        if len(self.waves) != self.completeness.n_waves:
            raise ValidationError(f"{self.completeness.value} needs {self.completeness.n_waves} waves")
        _check_contiguous(self.waves)
        for k, w in enumerate(self.waves):
            with_trend = k % 2 == 0
            if w.rises != ((self.direction is Direction.UP) == with_trend):
                raise ValidationError(f"{w.label.value} moves the wrong way for a {self.direction.value} impulse")
        if self.rules is not None and not self.rules.all_hard_rules_pass:
            raise ValidationError("impulse violates a hard rule")

    @property
    def kind(self) -> PatternKind:
        return self.completeness.kind

    @property
    def pivots(self) -> tuple[SwingPoint, ...]:
        return (self.waves[0].start,) + tuple(w.end for w in self.waves)

    @property
    def start_index(self) -> int:
        return self.waves[0].start.candle_index

    @property
    def end_index(self) -> int:
        return self.waves[-1].end.candle_index

    @property
    def duration(self) -> int:
        return self.end_index - self.start_index

    @property
    def id(self) -> str:
        return f"{self.kind.value}-{self.direction.value}-{self.start_index}-{self.end_index}"

    def wave(self, label: "WaveLabel | str") -> Wave:
        label = WaveLabel(label)
        for w in self.waves:
            if w.label is label:
                return w
        raise KeyError(label)


@dataclass(frozen=True)
class CorrectivePattern:
    direction: Direction
    waves: tuple[Wave, ...]
    fib: FibAssessment = field(default_factory=FibAssessment)

    def __post_init__(self):
        object.__setattr__(self, "waves", tuple(self.waves))
        if [w.label for w in self.waves] != [WaveLabel.WA, WaveLabel.WB, WaveLabel.WC]:
            raise ValidationError("corrective pattern needs waves A, B, C")
        _check_contiguous(self.waves)
        down = self.direction is Direction.DOWN
        a, b, c = self.waves
        if a.rises == down or c.rises == down or b.rises != down:
            raise ValidationError("A and C must move with the correction, B against it")

    @property
    def kind(self) -> PatternKind:
        return PatternKind.CORRECTIVE_ABC

    @property
    def pivots(self) -> tuple[SwingPoint, ...]:
        return (self.waves[0].start,) + tuple(w.end for w in self.waves)

    @property
    def start_index(self) -> int:
        return self.waves[0].start.candle_index

    @property
    def end_index(self) -> int:
        return self.waves[-1].end.candle_index

    @property
    def duration(self) -> int:
        return self.end_index - self.start_index

    @property
    def id(self) -> str:
        return f"{self.kind.value}-{self.direction.value}-{self.start_index}-{self.end_index}"


def _check_contiguous(waves: Sequence[Wave]):
    for prev, nxt in zip(waves, waves[1:]):
        if nxt.start != prev.end:
            raise ValidationError(f"{nxt.label.value} does not start where {prev.label.value} ends")


# ---------------------------------------------------------------------------
# Rules
# ---------------------------------------------------------------------------

def impulse_rules(prices: Sequence[float], direction: Direction, completeness: Completeness,
                  require_w3_dominance: bool = True) -> RuleReport:
    """Evaluate the hard rules on pivot prices ``p0 .. p4`` (or ``p5``).

    Comparisons are made in trend-oriented coordinates so Down patterns are
    the exact mirror of Up ones.
    """
    s = direction.sign
    p = [s * x for x in prices]
    w1 = p[1] - p[0]
    w3 = p[3] - p[2]
    rule2 = p[2] > p[0]
    rule4 = p[4] > p[1]
    rule3 = None
    if completeness is Completeness.COMPLETE5:
        w5 = p[5] - p[4]
        rule3 = not (w3 < w1 and w3 < w5)
    dominance = None
    if require_w3_dominance and completeness is Completeness.INCOMPLETE4:
        dominance = w3 > w1
    return RuleReport(rule2, rule3, rule4, dominance)


def _legs_alternate(points: Sequence[SwingPoint], direction: Direction) -> bool:
    s = direction.sign
    for k in range(len(points) - 1):
        move = (points[k + 1].price - points[k].price) * s
        if (move > 0) != (k % 2 == 0) or move == 0:
            return False
        if points[k + 1].candle_index <= points[k].candle_index:
            return False
    return True


def _make_waves(points: Sequence[SwingPoint], labels: Sequence[str]) -> tuple[Wave, ...]:
    return tuple(Wave(WaveLabel(lab), points[k], points[k + 1]) for k, lab in enumerate(labels))


def find_impulse(swings: SwingSequence, completeness: "Completeness | str",
                 config: WaveConfig | None = None) -> list[ImpulsePattern]:
    """Every contiguous pivot window forming a rule-abiding impulse.

    Windows of 5 pivots are tried for 1-2-3-4 patterns and 6 for 1-2-3-4-5;
    the direction follows the first pivot (a Low opens an Up impulse).
    """
    completeness = Completeness(completeness)
    config = config or WaveConfig()
    size = completeness.n_waves + 1
    pts = swings.points
    labels = IMPULSE_LABELS[:completeness.n_waves]
    out = []
    for start in range(len(pts) - size + 1):
        window = pts[start:start + size]
        direction = Direction.UP if window[0].kind is SwingKind.LOW else Direction.DOWN
        if not _legs_alternate(window, direction):
            continue
        rules = impulse_rules([p.price for p in window], direction, completeness,
                              config.require_w3_dominance)
        if not rules.all_hard_rules_pass:
            continue
        pattern = ImpulsePattern(direction, _make_waves(window, labels), completeness, rules=rules)
        fib = assess_fibonacci(pattern, config.fib_tolerance, config.canonical_ratios)
        out.append(ImpulsePattern(direction, pattern.waves, completeness, fib, rules))
    return out


def find_corrective(swings: SwingSequence, preceding: ImpulsePattern | None = None,
                    config: WaveConfig | None = None) -> list[CorrectivePattern]:
    """A-B-C windows of four pivots moving against the prior trend.

    Wave B may not retrace beyond the start of wave A. With ``preceding``
    given, only the window that begins on its last pivot and runs against
    its direction is considered.
    """
    config = config or WaveConfig()
    pts = swings.points
    out = []
    for start in range(len(pts) - 3):
        window = pts[start:start + 4]
        if preceding is not None:
            last = preceding.pivots[-1]
            if window[0].candle_index != last.candle_index or window[0].kind != last.kind:
                continue
        direction = Direction.DOWN if window[0].kind is SwingKind.HIGH else Direction.UP
        if preceding is not None and direction is preceding.direction:
            continue
        if not _legs_alternate(window, direction):
            continue
        s = direction.sign
        if not s * (window[2].price - window[0].price) > 0:  # B stays short of the A start
            continue
        pattern = CorrectivePattern(direction, _make_waves(window, CORRECTIVE_LABELS))
        fib = assess_fibonacci(pattern, config.fib_tolerance, config.canonical_ratios)
        out.append(CorrectivePattern(direction, pattern.waves, fib))
    return out


# ---------------------------------------------------------------------------
# Fibonacci
# ---------------------------------------------------------------------------

def fib_level(anchor_high: float, anchor_low: float, ratio: float) -> float:
    """Price at ``ratio`` of the way back from ``anchor_high`` to ``anchor_low``."""
    if not anchor_high > anchor_low:
        raise InvalidAnchorError(f"anchor_high {anchor_high} must exceed anchor_low {anchor_low}")
    if ratio < 0:
        raise ValueError("ratio must be >= 0")
    return anchor_high - ratio * (anchor_high - anchor_low)


def proximity_score(ratio: float, tolerance: float,
                    canonical: Sequence[float] = CANONICAL_RATIOS) -> float:
    distance = min(abs(ratio - c) for c in canonical)
    return max(0.0, 1.0 - distance / tolerance)


def assess_fibonacci(pattern: "ImpulsePattern | CorrectivePattern", tolerance: float = 0.10,
                     canonical: Sequence[float] = CANONICAL_RATIOS) -> FibAssessment:
    lengths = [w.price_length for w in pattern.waves]
    if isinstance(pattern, CorrectivePattern):
        a, b, c = lengths
        ratios = {"ratio_wb_wa": b / a, "ratio_wc_wa": c / a}
    else:
        ratios = {
            "ratio_w2_w1": lengths[1] / lengths[0],
            "ratio_w4_w3": lengths[3] / lengths[2],
            "ratio_w3_w1": lengths[2] / lengths[0],
        }
        if len(lengths) == 5:
            ratios["ratio_w5_w1"] = lengths[4] / lengths[0]
    scores = tuple(proximity_score(r, tolerance, canonical) for r in ratios.values())
    return FibAssessment(conformance_score=sum(scores) / len(scores), proximity=scores, **ratios)


def rank_key(pattern: "ImpulsePattern | CorrectivePattern") -> tuple:
    """Sort key preferring higher conformance, then longer duration, then earlier start."""
    return (-pattern.fib.conformance_score, -pattern.duration, pattern.start_index)
