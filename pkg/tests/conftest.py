"""Shared builders and independent oracles for the test suite.

The oracles here deliberately avoid the package's own helpers: rules are
checked on raw prices with explicit Up/Down branches, and pattern
enumeration is a plain nested loop over pivot windows.
"""

from __future__ import annotations

import numpy as np
import pytest

from wavedesk.market_data import Candle, CandleSeries, Interval, DEFAULT_START
from wavedesk.swings import SwingKind, SwingPoint, SwingSequence

DAY = 86_400


def series_from_closes(closes, symbol="TEST", interval=Interval.DAILY) -> CandleSeries:
    """Candles whose open is the previous close and whose wicks hug the body."""
    step = Interval.parse(interval).seconds
    candles = []
    prev = float(closes[0])
    for t, c in enumerate(closes):
        c = float(c)
        candles.append(Candle(DEFAULT_START + t * step, prev, max(prev, c), min(prev, c), c, 1.0))
        prev = c
    return CandleSeries(symbol, Interval.parse(interval), tuple(candles))


def path_from_pivots(prices, durations) -> list[float]:
    """Piecewise-linear close path through ``prices``; pivots land exactly."""
    out = [float(prices[0])]
    for k, d in enumerate(durations):
        a, b = prices[k], prices[k + 1]
        out += [a + (b - a) * (j / d) for j in range(1, d)] + [float(b)]
    return out


def swings_from_prices(prices, first_kind=SwingKind.LOW, gap=5) -> SwingSequence:
    kinds = (SwingKind.LOW, SwingKind.HIGH) if first_kind is SwingKind.LOW else (SwingKind.HIGH, SwingKind.LOW)
    pts = [SwingPoint(i * gap, float(p), kinds[i % 2], i * gap + 1) for i, p in enumerate(prices)]
    return SwingSequence(tuple(pts), 0.02)


# ---------------------------------------------------------------------------
# Oracles
# ---------------------------------------------------------------------------

def oracle_rules_ok(prices, up: bool, n_waves: int, w3_dominance: bool = True) -> bool:
    """Hard wave rules written out on raw prices, one branch per direction."""
    p = list(prices)
    if up:
        legs_ok = p[1] > p[0] and p[2] < p[1] and p[3] > p[2] and p[4] < p[3]
        if n_waves == 5:
            legs_ok = legs_ok and p[5] > p[4]
        rule2 = p[2] > p[0]
        rule4 = p[4] > p[1]
    else:
        legs_ok = p[1] < p[0] and p[2] > p[1] and p[3] < p[2] and p[4] > p[3]
        if n_waves == 5:
            legs_ok = legs_ok and p[5] < p[4]
        rule2 = p[2] < p[0]
        rule4 = p[4] < p[1]
    if not (legs_ok and rule2 and rule4):
        return False
    len1, len3 = abs(p[1] - p[0]), abs(p[3] - p[2])
    if n_waves == 5:
        len5 = abs(p[5] - p[4])
        return not (len3 < len1 and len3 < len5)
    return len3 > len1 if w3_dominance else True


def brute_force_impulses(points, n_waves: int, w3_dominance: bool = True) -> set:
    """All windows of ``n_waves + 1`` consecutive pivots that form an impulse."""
    found = set()
    size = n_waves + 1
    for start in range(len(points)):
        if start + size > len(points):
            break
        window = points[start:start + size]
        up = window[0].kind is SwingKind.LOW
        if oracle_rules_ok([w.price for w in window], up, n_waves, w3_dominance):
            found.add(tuple(w.candle_index for w in window))
    return found


def independent_rule_violation(pattern) -> str | None:
    """Name of the first hard rule an emitted pattern breaks, else None."""
    p = [pt.price for pt in pattern.pivots]
    up = pattern.direction.value == "Up"
    if (up and not p[2] > p[0]) or (not up and not p[2] < p[0]):
        return "rule2"
    if (up and not p[4] > p[1]) or (not up and not p[4] < p[1]):
        return "rule4"
    if len(p) == 6:
        l1, l3, l5 = abs(p[1] - p[0]), abs(p[3] - p[2]), abs(p[5] - p[4])
        if l3 < l1 and l3 < l5:
            return "rule3"
    return None


def proximity_oracle(ratio, tol=0.10, canon=(0.382, 0.5, 0.618, 1.0, 1.618, 2.618)):
    d = min(abs(ratio - c) for c in canon)
    return max(0.0, 1.0 - d / tol)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# ---------------------------------------------------------------------------
# Acceptance summary: one line per criterion at the end of the run
# ---------------------------------------------------------------------------

ACCEPTANCE: dict[int, str] = {}


def record_criterion(number: int, ok: bool, detail: str) -> bool:
    line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE[number] = line
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[number])
