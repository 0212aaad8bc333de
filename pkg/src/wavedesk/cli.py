"""Command-line entry point.

Exit codes: 0 success, 1 usage or configuration error, 2 data error.
"""

from __future__ import annotations

import argparse
import configparser
import json
import sys
from dataclasses import fields
from pathlib import Path

from .chart import render_chart
from .config import GlobalConfig, _coerce
from .enums import Direction, PatternKind
from .exceptions import ConfigError, WaveDeskError
from .harness import ExperimentConfig, format_results, run_crossval, write_results
from .knowledge import KnowledgeStore
from .market_data import Interval, LocalFileFetcher, SynthSpec, synth_series, to_csv
from .pipeline import (AnalysisRequest, BacktestQuery, _parse_time, backtest_fingerprint,
                       backtester, load_request, run_analysis)

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2
DEFAULT_WINDOW = {Interval.DAILY: 365, Interval.HOURLY: 500}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 by default; usage errors here are 1
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(f"{self.prog}: error: {message}")


def _common(p: argparse.ArgumentParser, interval: bool = True) -> None:
    p.add_argument("--config", help="INI configuration file")
    p.add_argument("--seed", type=int, help="override the configured seed")
    p.add_argument("--no-backtest", action="store_true", help="skip knowledge-based forecast adjustment")
    if interval:
        p.add_argument("--interval", choices=[i.value for i in Interval], default=Interval.DAILY.value)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="wavedesk", description="Elliott wave analysis desk")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("analyze", help="run the full analysis pipeline for one symbol")
    p.add_argument("symbol")
    _common(p)
    p.add_argument("--from", dest="start", help="window start (ISO-8601 date)")
    p.add_argument("--to", dest="end", help="window end, exclusive (ISO-8601 date)")
    p.add_argument("--runs-dir", help="where run artifacts go")

    p = sub.add_parser("backtest", help="train the knowledge base on a symbol's history")
    p.add_argument("symbol")
    _common(p)
    p.add_argument("--from", dest="start")
    p.add_argument("--to", dest="end")

    p = sub.add_parser("crossval", help="run a cross-validation experiment")
    _common(p, interval=False)
    p.add_argument("--format", choices=["text", "csv", "markdown"], default="text")

    p = sub.add_parser("simulate", help="generate a synthetic series with an embedded pattern")
    p.add_argument("--spec", help="INI file with a [synth] section")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="CSV output path (default sim_<seed>.csv)")

    p = sub.add_parser("render", help="re-render the chart of a finished run")
    p.add_argument("--run", required=True, help="run id under the runs directory")
    p.add_argument("--config")
    p.add_argument("--runs-dir")
    p.add_argument("--out", help="SVG path (default <run>/chart.svg)")
    return parser


def _engine(args) -> GlobalConfig:
    config = GlobalConfig.load(getattr(args, "config", None))
    overrides = {}
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    if getattr(args, "no_backtest", False):
        overrides["backtest"] = False
    if getattr(args, "runs_dir", None):
        overrides["runs_dir"] = args.runs_dir
    return config.replace(**overrides)


def _window(args, interval: Interval, fetcher) -> tuple:
    """Requested span; by default the most recent window of candles."""
    start, end = args.start, args.end
    if start is None or end is None:
        series = fetcher.load(args.symbol, interval)
        if end is None:
            end = series.candles[-1].timestamp + interval.seconds
        if start is None:
            kept = series.between(None, _parse_time(end))
            start = kept.candles[max(0, len(kept) - DEFAULT_WINDOW[interval])].timestamp
    return start, end


def _analyze(args, out) -> int:
    config = _engine(args)
    interval = Interval.parse(args.interval)
    fetcher = LocalFileFetcher(config.resolved_data_dir())
    start, end = _window(args, interval, fetcher)
    request = AnalysisRequest(args.symbol, interval, start, end, config)
    bundle, report = run_analysis(request, fetcher=fetcher, store=KnowledgeStore(config.store_dir),
                                  out_dir=config.runs_dir)
    run_dir = Path(config.runs_dir) / bundle.run_id
    n_patterns = len(bundle.impulses) + len(bundle.correctives)
    print(f"run {bundle.run_id}: {n_patterns} patterns, {len(bundle.adjusted_forecasts)} signals", file=out)
    for f in bundle.adjusted_forecasts:
        print(f"  {f.pattern_id}: {f.signal.value} entry={f.entry:.2f}", file=out)
    print(f"report: {run_dir / 'report.md'}", file=out)
    return EXIT_OK


def _backtest(args, out) -> int:
    config = _engine(args).replace(backtest=True)
    interval = Interval.parse(args.interval)
    fetcher = LocalFileFetcher(config.resolved_data_dir())
    full = fetcher.load(args.symbol, interval)
    start = args.start if args.start is not None else full.candles[0].timestamp
    end = args.end if args.end is not None else full.candles[-1].timestamp + interval.seconds
    request = AnalysisRequest(args.symbol, interval, start, end, config)
    history = full.between(request.start, request.end)
    query = BacktestQuery(request.symbol, history, backtest_fingerprint(request, history), True)
    batch = backtester(query, config, KnowledgeStore(config.store_dir))
    print(f"{request.symbol}: {batch.note}; {len(batch.records)} records, "
          f"{batch.episodes_run} episodes run", file=out)
    return EXIT_OK


def _crossval(args, out) -> int:
    if not args.config:
        raise _UsageError("crossval requires --config")
    try:
        text = Path(args.config).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {args.config}: {exc}") from None
    experiment, engine = ExperimentConfig.from_ini(text)
    if args.seed is not None:
        experiment = ExperimentConfig(**{**experiment.__dict__, "seed": args.seed})
    if args.no_backtest:
        experiment = ExperimentConfig(**{**experiment.__dict__, "with_backtesting": False})
    rows = run_crossval(experiment, engine)
    path = write_results(rows, engine.results_dir, experiment.name)
    print(format_results(rows, args.format), file=out, end="")
    print(f"results: {path}", file=out)
    errors = [r for r in rows if r.error]
    return EXIT_DATA if errors and len(errors) == len(rows) else EXIT_OK


def load_spec(path: "str | None") -> SynthSpec:
    """Read a ``[synth]`` section into a :class:`SynthSpec`."""
    if path is None:
        return SynthSpec(PatternKind.IMPULSE5)
    parser = configparser.ConfigParser()
    try:
        parser.read_string(Path(path).read_text(encoding="utf-8"))
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read spec {path}: {exc}") from None
    if "synth" not in parser:
        raise ConfigError("spec file lacks a [synth] section")
    types = {f.name: f.type for f in fields(SynthSpec)}
    values: dict = {}
    for key, raw in parser["synth"].items():
        if key not in types:
            raise ConfigError(f"unknown spec key {key!r}")
        if key == "pattern_kind":
            values[key] = PatternKind(raw.strip())
        elif key == "direction":
            values[key] = Direction(raw.strip().capitalize())
        elif key == "interval":
            values[key] = Interval.parse(raw.strip())
        elif key == "candles_per_wave":
            counts = tuple(int(x) for x in raw.split(","))
            values[key] = counts[0] if len(counts) == 1 else counts
        else:
            values[key] = _coerce(raw, types[key], key)
    try:
        return SynthSpec(**values)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def _simulate(args, out) -> int:
    spec = load_spec(args.spec)
    series, annotations = synth_series(spec, args.seed)
    path = Path(args.out or f"sim_{args.seed}.csv")
    path.write_text(to_csv(series), encoding="utf-8")
    for a in annotations:
        print(json.dumps({"pattern": a.pattern_kind.value, "direction": a.direction.value,
                          "pivots": list(a.pivot_indices)}), file=out)
    print(f"wrote {len(series)} candles to {path}", file=out)
    return EXIT_OK


def _render(args, out) -> int:
    config = GlobalConfig.load(args.config)
    run_dir = Path(args.runs_dir or config.runs_dir) / args.run
    transcript = run_dir / "transcript.jsonl"
    if not transcript.exists():
        raise FileNotFoundError(f"no transcript for run {args.run} in {run_dir}")
    request = load_request(transcript)
    bundle, _ = run_analysis(request, store=KnowledgeStore(request.config.store_dir))
    target = Path(args.out) if args.out else run_dir / "chart.svg"
    target.write_text(render_chart(bundle.series, bundle), encoding="utf-8")
    print(f"chart: {target}", file=out)
    return EXIT_OK


COMMANDS = {"analyze": _analyze, "backtest": _backtest, "crossval": _crossval,
            "simulate": _simulate, "render": _render}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_help(sys.stderr)
            return EXIT_USAGE
        return COMMANDS[args.command](args, out)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (WaveDeskError, OSError, ValueError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
