"""Small enumerations shared by several modules."""

from enum import Enum


class Direction(str, Enum):
    UP = "Up"
    DOWN = "Down"

    @property
    def sign(self) -> int:
        return 1 if self is Direction.UP else -1

    @property
    def opposite(self) -> "Direction":
        return Direction.DOWN if self is Direction.UP else Direction.UP


class PatternKind(str, Enum):
    IMPULSE4 = "Impulse4"
    IMPULSE5 = "Impulse5"
    CORRECTIVE_ABC = "CorrectiveABC"


class Completeness(str, Enum):
    INCOMPLETE4 = "Incomplete4"
    COMPLETE5 = "Complete5"

    @property
    def n_waves(self) -> int:
        return 4 if self is Completeness.INCOMPLETE4 else 5

    @property
    def kind(self) -> PatternKind:
        return PatternKind.IMPULSE4 if self is Completeness.INCOMPLETE4 else PatternKind.IMPULSE5

    @classmethod
    def from_kind(cls, kind: PatternKind) -> "Completeness":
        if kind is PatternKind.IMPULSE4:
            return cls.INCOMPLETE4
        if kind is PatternKind.IMPULSE5:
            return cls.COMPLETE5
        raise ValueError(f"{kind} is not an impulse kind")


class Signal(str, Enum):
    BUY = "Buy"
    SELL = "Sell"
    HOLD = "Hold"
