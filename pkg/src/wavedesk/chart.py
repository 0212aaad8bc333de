"""Deterministic SVG candlestick charts with wave labels and forecast levels."""

from __future__ import annotations

from typing import Iterable
from xml.sax.saxutils import escape

from .exceptions import RenderError
from .market_data import CandleSeries

WIDTH, HEIGHT = 1000, 520
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 60, 110, 30, 40

_STYLE = (
    ".up{fill:#26a69a;stroke:#26a69a}.down{fill:#ef5350;stroke:#ef5350}"
    ".wick{stroke-width:1}.wave{fill:none;stroke:#1e88e5;stroke-width:1.5}"
    ".corrective{stroke:#fb8c00}.wave-label{font:bold 13px sans-serif;fill:#0d47a1}"
    ".level{stroke-dasharray:6 4;stroke-width:1}.level-label{font:11px sans-serif}"
    ".entry{stroke:#424242;fill:#424242}.target{stroke:#2e7d32;fill:#2e7d32}"
    ".resistance{stroke:#8e24aa;fill:#8e24aa}.stop{stroke:#c62828;fill:#c62828}"
    ".title{font:bold 14px sans-serif}"
)


def _f(x: float) -> str:
    return f"{x:.2f}"


def render_chart(series: CandleSeries, patterns=(), forecasts=(), title: str | None = None) -> str:
    """Render candles, wave polylines with labels 1-5 / A-C, and level lines.

    ``patterns`` may be an analysis bundle (its chart patterns and adjusted
    forecasts are used) or an iterable of impulse/corrective patterns.
    """
    if hasattr(patterns, "chart_patterns"):
        bundle = patterns
        patterns = bundle.chart_patterns()
        forecasts = forecasts or bundle.adjusted_forecasts
    patterns = list(patterns)
    forecasts = [f for f in forecasts if f is not None]
    n = len(series)
    for p in patterns:
        for pivot in p.pivots:
            if not 0 <= pivot.candle_index < n:
                raise RenderError(f"pattern {p.id} references candle {pivot.candle_index} outside 0..{n - 1}")

    prices = []
    if n:
        prices += [float(series.highs.max()), float(series.lows.min())]
    for f in forecasts:
        prices += [f.entry, f.primary_target, f.stop_loss]
        if f.secondary_target is not None:
            prices.append(f.secondary_target)
    lo, hi = (min(prices), max(prices)) if prices else (0.0, 1.0)
    if hi <= lo:
        hi, lo = hi + 1.0, lo - 1.0
    pad = 0.04 * (hi - lo)
    lo, hi = lo - pad, hi + pad
    plot_w = WIDTH - MARGIN_L - MARGIN_R
    plot_h = HEIGHT - MARGIN_T - MARGIN_B
    step = plot_w / max(n, 1)

    def x(i: int) -> float:
        return MARGIN_L + (i + 0.5) * step

    def y(p: float) -> float:
        return MARGIN_T + (hi - p) / (hi - lo) * plot_h

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f"<style>{_STYLE}</style>",
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>',
    ]
    heading = title if title is not None else f"{series.symbol} ({series.interval.label})"
    out.append(f'<text class="title" x="{MARGIN_L}" y="18">{escape(heading)}</text>')
    for k in range(5):
        p = lo + (hi - lo) * k / 4
        out.append(f'<text class="axis" x="{WIDTH - MARGIN_R + 5}" y="{_f(y(p))}" '
                   f'font-size="10">{_f(p)}</text>')

    body_w = max(step * 0.6, 0.5)
    out.append('<g class="candles">')
    for i, c in enumerate(series.candles):
        cls = "up" if c.close >= c.open else "down"
        top, bottom = y(max(c.open, c.close)), y(min(c.open, c.close))
        out.append(f'<line class="wick {cls}" x1="{_f(x(i))}" y1="{_f(y(c.high))}" '
                   f'x2="{_f(x(i))}" y2="{_f(y(c.low))}"/>')
        out.append(f'<rect class="{cls}" x="{_f(x(i) - body_w / 2)}" y="{_f(top)}" '
                   f'width="{_f(body_w)}" height="{_f(max(bottom - top, 0.5))}"/>')
    out.append("</g>")

    labels = []
    for p in patterns:
        corrective = p.kind.value == "CorrectiveABC"
        pts = " ".join(f"{_f(x(v.candle_index))},{_f(y(v.price))}" for v in p.pivots)
        cls = "wave corrective" if corrective else "wave"
        out.append(f'<polyline class="{cls}" data-pattern="{escape(p.id)}" points="{pts}"/>')
        for w in p.waves:
            above = w.end.is_high
            ly = y(w.end.price) + (-8 if above else 16)
            labels.append((w.end.candle_index, 0 if not corrective else 1,
                           f'<text class="wave-label" x="{_f(x(w.end.candle_index))}" y="{_f(ly)}" '
                           f'text-anchor="middle">{w.label.short}</text>'))
    labels.sort(key=lambda item: (item[0], item[1]))
    out.extend(item[2] for item in labels)

    for f in forecasts:
        levels = [("entry", "Entry", f.entry), ("target", "Target", f.primary_target),
                  ("stop", "Stop", f.stop_loss)]
        if f.secondary_target is not None:
            levels.insert(2, ("resistance", "Resistance", f.secondary_target))
        for cls, name, price in levels:
            out.append(f'<line class="level {cls}" x1="{MARGIN_L}" y1="{_f(y(price))}" '
                       f'x2="{WIDTH - MARGIN_R}" y2="{_f(y(price))}"/>')
            out.append(f'<text class="level-label {cls}" x="{WIDTH - MARGIN_R + 5}" '
                       f'y="{_f(y(price) - 3)}">{name} {_f(price)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
