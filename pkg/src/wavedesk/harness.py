"""Cross-validation experiments: pattern accuracy with and without backtesting."""

from __future__ import annotations

import configparser
import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path

from .config import GlobalConfig
from .enums import Completeness, PatternKind, Signal
from .exceptions import ConfigError, WaveDeskError
from .learn import KnowledgeIndex, adjust_forecast, collect_samples, forecast_key, train_q_table
from .market_data import Interval, LocalFileFetcher

PATTERN_LABELS = {PatternKind.IMPULSE4: "1-2-3-4", PatternKind.IMPULSE5: "1-2-3-4-5"}
COLUMNS = ("symbol", "pattern", "N", "without", "with", "excluded")


def _ts(value) -> int | None:
    if value is None or value == "":
        return None
    if isinstance(value, (int, float)):
        return int(value)
    text = str(value).strip()
    if text.lstrip("-").isdigit():
        return int(text)
    dt = datetime.fromisoformat(text)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return int(dt.timestamp())


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment over several symbols at a single interval.

    Ranges are half-open ``[start, end)`` epoch-second spans; ``None`` bounds
    are open. When both ranges are omitted the last ``sample_count`` candles
    of each symbol are evaluated and everything earlier is used for training.
    """

    symbols: tuple[str, ...]
    interval: Interval = Interval.DAILY
    sample_count: int = 1000
    completeness: tuple[Completeness, ...] = (Completeness.INCOMPLETE4, Completeness.COMPLETE5)
    with_backtesting: bool = True
    train_range: tuple[int | None, int | None] | None = None
    eval_range: tuple[int | None, int | None] | None = None
    seed: int = 0
    name: str = "experiment"

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(s.upper() for s in self.symbols))
        object.__setattr__(self, "interval", Interval.parse(self.interval))
        object.__setattr__(self, "completeness", tuple(Completeness(c) for c in self.completeness))
        if not self.symbols:
            raise ConfigError("an experiment needs at least one symbol")
        if self.sample_count < 1:
            raise ConfigError("sample_count must be >= 1")
        if (self.train_range is None) != (self.eval_range is None):
            raise ConfigError("give both train_range and eval_range, or neither")
        if self.train_range is not None:
            t0, t1 = (_ts(v) for v in self.train_range)
            e0, e1 = (_ts(v) for v in self.eval_range)
            object.__setattr__(self, "train_range", (t0, t1))
            object.__setattr__(self, "eval_range", (e0, e1))
            if not ranges_disjoint((t0, t1), (e0, e1)):
                raise ConfigError("train and eval ranges overlap")

    @classmethod
    def from_ini(cls, text: str) -> tuple["ExperimentConfig", GlobalConfig]:
        """Parse an ``[experiment]`` section plus ordinary engine sections."""
        parser = configparser.ConfigParser()
        try:
            parser.read_string(text)
        except configparser.Error as exc:
            raise ConfigError(f"unreadable experiment file: {exc}") from None
        if "experiment" not in parser:
            raise ConfigError("missing [experiment] section")
        sec = parser["experiment"]
        kwargs: dict = {"symbols": tuple(s.strip() for s in sec.get("symbols", "").split(",") if s.strip())}
        if "interval" in sec:
            kwargs["interval"] = Interval.parse(sec["interval"])
        if "sample_count" in sec:
            kwargs["sample_count"] = sec.getint("sample_count")
        if "completeness" in sec:
            kwargs["completeness"] = tuple(Completeness(c.strip()) for c in sec["completeness"].split(","))
        if "with_backtesting" in sec:
            kwargs["with_backtesting"] = sec.getboolean("with_backtesting")
        if "seed" in sec:
            kwargs["seed"] = sec.getint("seed")
        if "name" in sec:
            kwargs["name"] = sec["name"].strip()
        if "train_start" in sec or "train_end" in sec or "eval_start" in sec or "eval_end" in sec:
            kwargs["train_range"] = (sec.get("train_start"), sec.get("train_end"))
            kwargs["eval_range"] = (sec.get("eval_start"), sec.get("eval_end"))
        parser.remove_section("experiment")
        buf = io.StringIO()
        parser.write(buf)
        engine = GlobalConfig.from_ini(buf.getvalue())
        try:
            experiment = cls(**kwargs)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from None
        return experiment, engine


def ranges_disjoint(a, b) -> bool:
    inf = float("inf")
    a0, a1 = (-inf if a[0] is None else a[0]), (inf if a[1] is None else a[1])
    b0, b1 = (-inf if b[0] is None else b[0]), (inf if b[1] is None else b[1])
    return a1 <= b0 or b1 <= a0


@dataclass(frozen=True)
class ResultRow:
    symbol: str
    pattern_kind: PatternKind
    n_patterns: int
    accuracy_without: float | None
    accuracy_with: float | None
    excluded: int
    interval: Interval = Interval.DAILY
    correct_without: int = 0
    correct_with: int = 0
    error: str | None = None

    def __post_init__(self):
        for acc in (self.accuracy_without, self.accuracy_with):
            if acc is not None and not 0.0 <= acc <= 1.0:
                raise ValueError("accuracies must lie in [0, 1]")
        if self.n_patterns < 0 or self.excluded < 0 or self.excluded > self.n_patterns:
            raise ValueError("inconsistent pattern counts")


def _accuracy(correct: int, evaluated: int) -> float | None:
    return correct / evaluated if evaluated else None


def _symbol_rows(symbol: str, experiment: ExperimentConfig, engine: GlobalConfig, fetcher) -> list[ResultRow]:
    interval = experiment.interval
    try:
        full = fetcher.load(symbol, interval)
    except (WaveDeskError, OSError) as exc:
        return [ResultRow(symbol, c.kind, 0, None, None, 0, interval, error=str(exc))
                for c in experiment.completeness]

    if experiment.train_range is None:
        split = max(0, len(full) - experiment.sample_count)
        train, evals = full.slice(0, split), full.slice(split)
    else:
        train = full.between(*experiment.train_range)
        evals = full.between(*experiment.eval_range)

    options = engine.sample_options(interval)
    wave_cfg = engine.wave_config()
    index = KnowledgeIndex()
    if experiment.with_backtesting and len(train):
        params = engine.replace(seed=experiment.seed).train_params()
        train_samples = collect_samples(train, wave_cfg, **options)
        index = KnowledgeIndex(train_q_table(train_samples, params, int(train.candles[-1].timestamp)).records)

    samples = []
    if len(evals):
        samples = [s for s in collect_samples(evals, wave_cfg, completeness=experiment.completeness, **options)
                   if s.forecast.issued_at_index < experiment.sample_count]

    rows = []
    for comp in experiment.completeness:
        group = [s for s in samples if s.pattern.completeness is comp]
        evaluated = [s for s in group if s.outcome is not None]
        correct_without = sum(1 for s in evaluated if s.outcome.correct)
        correct_with = 0
        for s in evaluated:
            raw = s.forecast
            key = forecast_key(s.pattern, raw, evals, engine.trend_window)
            adjusted = adjust_forecast(raw, key, index, engine.min_hit_rate)
            rejected = raw.signal is not Signal.HOLD and adjusted.signal is Signal.HOLD
            # a rejection is a correct decision exactly when the raw call was wrong
            correct_with += int(s.outcome.correct != rejected)
        n_eval = len(evaluated)
        rows.append(ResultRow(
            symbol, comp.kind, len(group), _accuracy(correct_without, n_eval),
            _accuracy(correct_with, n_eval) if experiment.with_backtesting else None,
            len(group) - n_eval, interval, correct_without,
            correct_with if experiment.with_backtesting else 0))
    return rows


def run_crossval(experiment: ExperimentConfig, engine: GlobalConfig | None = None,
                 fetcher=None, max_workers: int | None = None) -> list[ResultRow]:
    """Evaluate every symbol; rows come back in declared symbol order.

    Per symbol the backtester trains on the train span only; the evaluation
    span is scanned for patterns issued within its first ``sample_count``
    candles, and later candles there serve only as forward data.
    """
    engine = engine or GlobalConfig()
    fetcher = fetcher or LocalFileFetcher(engine.resolved_data_dir())
    workers = max_workers or min(8, len(experiment.symbols))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(lambda s: _symbol_rows(s, experiment, engine, fetcher), experiment.symbols))
    return [row for rows in results for row in rows]


class ResultFormat(str, Enum):
    TEXT = "text"
    CSV = "csv"
    MARKDOWN = "markdown"


def _pct(x: float | None) -> str:
    return "n/a" if x is None else f"{100 * x:.2f}%"


def _long_rows(rows):
    for r in rows:
        yield (r.symbol, PATTERN_LABELS[r.pattern_kind], str(r.n_patterns), _pct(r.accuracy_without),
               _pct(r.accuracy_with), str(r.excluded))


def _wide_rows(rows):
    """Wide layout: one line per symbol and interval, both pattern kinds side by side."""
    header = ("Stock", "1-2-3-4 N", "1-2-3-4 Without", "1-2-3-4 With",
              "1-2-3-4-5 N", "1-2-3-4-5 Without", "1-2-3-4-5 With")
    sections = []
    for interval in (Interval.DAILY, Interval.HOURLY):
        subset = [r for r in rows if r.interval is interval]
        if not subset:
            continue
        symbols = list(dict.fromkeys(r.symbol for r in subset))
        body = []
        for sym in symbols:
            line = [sym]
            for kind in (PatternKind.IMPULSE4, PatternKind.IMPULSE5):
                match = [r for r in subset if r.symbol == sym and r.pattern_kind is kind]
                if match:
                    r = match[0]
                    line += [str(r.n_patterns), _pct(r.accuracy_without), _pct(r.accuracy_with)]
                else:
                    line += ["-", "-", "-"]
            body.append(tuple(line))
        sections.append((f"{interval.label.capitalize()} Interval", body))
    return header, sections


def format_results(rows, fmt: "ResultFormat | str" = ResultFormat.TEXT, layout: str = "long") -> str:
    """Render result rows.

    ``layout="long"`` gives one line per (symbol, pattern) with columns
    ``symbol,pattern,N,without,with,excluded``. ``layout="table"`` mirrors the
    published comparison table: per-interval sections, N / without / with for
    each pattern kind.
    """
    fmt = ResultFormat(fmt)
    rows = list(rows)
    if layout == "long":
        header, body = COLUMNS, list(_long_rows(rows))
        if fmt is ResultFormat.CSV:
            buf = io.StringIO()
            writer = csv.writer(buf, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(body)
            return buf.getvalue()
        if fmt is ResultFormat.MARKDOWN:
            return _markdown(header, [(None, body)])
        return _text(header, [(None, body)])
    if layout != "table":
        raise ValueError(f"unknown layout {layout!r}")
    header, sections = _wide_rows(rows)
    if fmt is ResultFormat.CSV:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(("interval",) + header)
        for title, body in sections:
            for line in body:
                writer.writerow((title.split()[0].lower(),) + line)
        return buf.getvalue()
    if fmt is ResultFormat.MARKDOWN:
        return _markdown(header, sections)
    return _text(header, sections)


def _markdown(header, sections) -> str:
    out = ["| " + " | ".join(header) + " |", "|" + "---|" * len(header)]
    for title, body in sections:
        if title:
            out.append(f"| *{title}* |" + " |" * (len(header) - 1))
        out += ["| " + " | ".join(line) + " |" for line in body]
    return "\n".join(out) + "\n"


def _text(header, sections) -> str:
    all_lines = [header] + [line for _, body in sections for line in body]
    widths = [max(len(line[i]) for line in all_lines) for i in range(len(header))]

    def fmt(line):
        return "  ".join(cell.ljust(w) if i == 0 else cell.rjust(w)
                         for i, (cell, w) in enumerate(zip(line, widths))).rstrip()

    out = [fmt(header), "-" * len(fmt(header))]
    for title, body in sections:
        if title:
            out.append(title)
        out += [fmt(line) for line in body]
    return "\n".join(out) + "\n"


def write_results(rows, directory: "str | Path", name: str) -> Path:
    path = Path(directory) / f"{name}.csv"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_results(rows, ResultFormat.CSV), encoding="utf-8")
    return path
