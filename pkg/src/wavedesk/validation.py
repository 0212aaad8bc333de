"""Input validation helpers shared by the estimator wrappers and the CLI."""

from __future__ import annotations

import numbers

import numpy as np

from .market_data import Candle, CandleSeries, DEFAULT_START, Interval


def check_series(X, *, symbol: str | None = None, interval=None) -> CandleSeries:
    """Coerce ``X`` into a :class:`CandleSeries`.

    Accepts a series (returned unchanged), a pandas DataFrame with
    ``open/high/low/close`` columns (optional ``volume`` and ``timestamp``,
    or a DatetimeIndex), or an array of shape (n, 4), (n, 5) or (n, 6) where
    six columns start with the timestamp.
    """
    if isinstance(X, CandleSeries):
        return X
    interval = Interval.parse(interval or Interval.DAILY)
    symbol = symbol or "UNKNOWN"
    step = interval.seconds

    if hasattr(X, "columns"):
        cols = {str(c).lower(): c for c in X.columns}
        missing = [k for k in ("open", "high", "low", "close") if k not in cols]
        if missing:
            raise ValueError(f"DataFrame lacks columns {missing}")
        n = len(X)
        if "timestamp" in cols:
            ts = np.asarray(X[cols["timestamp"]], dtype=np.int64)
        elif hasattr(X.index, "asi8"):
            ts = np.asarray(X.index.asi8, dtype=np.int64) // 1_000_000_000
        else:
            ts = DEFAULT_START + step * np.arange(n, dtype=np.int64)
        vol = np.asarray(X[cols["volume"]], dtype=float) if "volume" in cols else np.zeros(n)
        ohlc = np.column_stack([np.asarray(X[cols[k]], dtype=float) for k in ("open", "high", "low", "close")])
    else:
        arr = np.asarray(X, dtype=float)
        if arr.ndim != 2 or arr.shape[1] not in (4, 5, 6):
            raise ValueError(f"expected an array of shape (n, 4|5|6), got {arr.shape}")
        n = arr.shape[0]
        if arr.shape[1] == 6:
            ts, ohlc, vol = arr[:, 0].astype(np.int64), arr[:, 1:5], arr[:, 5]
        else:
            ts = DEFAULT_START + step * np.arange(n, dtype=np.int64)
            ohlc = arr[:, :4]
            vol = arr[:, 4] if arr.shape[1] == 5 else np.zeros(n)
    if n == 0:
        raise ValueError("no candles supplied")
    candles = tuple(Candle(int(ts[i]), *map(float, ohlc[i]), float(vol[i])) for i in range(n))
    return CandleSeries(symbol, interval, candles)


def check_fraction(value, name: str, *, low_inclusive: bool = False, high_inclusive: bool = False) -> float:
    if not isinstance(value, numbers.Real) or isinstance(value, bool):
        raise TypeError(f"{name} must be a real number")
    value = float(value)
    ok_low = value >= 0 if low_inclusive else value > 0
    ok_high = value <= 1 if high_inclusive else value < 1
    if not (ok_low and ok_high):
        lo = "[" if low_inclusive else "("
        hi = "]" if high_inclusive else ")"
        raise ValueError(f"{name} must lie in {lo}0, 1{hi}, got {value}")
    return value


def check_positive_int(value, name: str) -> int:
    if not isinstance(value, numbers.Integral) or isinstance(value, bool) or value < 1:
        raise ValueError(f"{name} must be a positive integer, got {value!r}")
    return int(value)
