import csv
import io

import pytest

from wavedesk.config import GlobalConfig
from wavedesk.enums import Completeness, PatternKind, Signal
from wavedesk.exceptions import ConfigError
from wavedesk.harness import (ExperimentConfig, ResultFormat, ResultRow, format_results, ranges_disjoint,
                              run_crossval, write_results)
from wavedesk.learn import KnowledgeIndex, adjust_forecast, collect_samples, forecast_key, train_q_table
from wavedesk.market_data import InMemoryFetcher, Interval, random_walk_series, regime_series

from conftest import series_from_closes


def test_overlapping_ranges_rejected():
    with pytest.raises(ConfigError):
        ExperimentConfig(("A",), train_range=(0, 100), eval_range=(50, 200))
    ExperimentConfig(("A",), train_range=(0, 100), eval_range=(100, 200))
    assert ranges_disjoint((None, 5), (5, None)) and not ranges_disjoint((None, None), (1, 2))
    with pytest.raises(ConfigError):
        ExperimentConfig(("A",), sample_count=0)


def test_result_row_invariants():
    with pytest.raises(ValueError):
        ResultRow("A", PatternKind.IMPULSE4, 3, 1.2, None, 0)
    with pytest.raises(ValueError):
        ResultRow("A", PatternKind.IMPULSE4, -1, None, None, 0)


def test_percent_rounding_and_single_row():
    row = ResultRow("AMZN", PatternKind.IMPULSE4, 24, 14 / 24, 16 / 24, 0)
    text = format_results([row], ResultFormat.CSV)
    lines = text.splitlines()
    assert lines[0] == "symbol,pattern,N,without,with,excluded"
    assert lines[1] == "AMZN,1-2-3-4,24,58.33%,66.67%,0"
    assert len(lines) == 2
    assert format_results([ResultRow("X", PatternKind.IMPULSE4, 1, 7 / 12, None, 0)]).count("58.33%") == 1


def test_not_applicable_when_nothing_detected():
    s = series_from_closes([40.0] * 1200, symbol="FLAT")
    rows = run_crossval(ExperimentConfig(("FLAT",)), fetcher=InMemoryFetcher([s]))
    assert [r.n_patterns for r in rows] == [0, 0]
    assert all(r.accuracy_without is None and r.accuracy_with is None for r in rows)
    assert "n/a" in format_results(rows)


def test_missing_symbol_gives_error_row():
    s = random_walk_series(1500, 3, symbol="OK")
    rows = run_crossval(ExperimentConfig(("MISSING", "OK")), fetcher=InMemoryFetcher([s]))
    assert [r.symbol for r in rows] == ["MISSING", "MISSING", "OK", "OK"]
    assert rows[0].error and rows[2].error is None


def test_reliable_fixture_is_perfect_both_ways():
    series, _ = regime_series(30, seed=2, p_unreliable=0.0)
    exp = ExperimentConfig(("REGIME",), sample_count=len(series) // 2, completeness=[Completeness.INCOMPLETE4])
    row, = run_crossval(exp, fetcher=InMemoryFetcher([series]))
    assert row.n_patterns > 0
    assert row.accuracy_without == 1.0 and row.accuracy_with == 1.0


def test_accuracy_matches_independent_count():
    series, _ = regime_series(30, seed=8, p_unreliable=0.5)
    engine = GlobalConfig()
    split = len(series) // 2
    exp = ExperimentConfig(("REGIME",), sample_count=len(series) - split)
    rows = run_crossval(exp, engine, fetcher=InMemoryFetcher([series]))
    train, evals = series.slice(0, split), series.slice(split)
    opts = engine.sample_options(Interval.DAILY)
    index = KnowledgeIndex(train_q_table(collect_samples(train, **opts), engine.train_params(), 0).records)
    samples = collect_samples(evals, **opts)
    for row in rows:
        group = [s for s in samples if s.pattern.kind is row.pattern_kind]
        done = [s for s in group if s.outcome is not None]
        hits = sum(s.outcome.correct for s in done)
        decisions = 0
        for s in done:
            adj = adjust_forecast(s.forecast, forecast_key(s.pattern, s.forecast, evals), index)
            kept = adj.signal is s.forecast.signal
            decisions += (kept and s.outcome.correct) or (not kept and not s.outcome.correct)
        assert row.n_patterns == len(group)
        assert row.excluded == len(group) - len(done)
        assert row.accuracy_without == hits / len(done)
        assert row.accuracy_with == decisions / len(done)


def test_table_layout_and_formats(tmp_path):
    rows = [ResultRow(sym, kind, 10, 0.5, 0.6, 0, iv)
            for iv in (Interval.DAILY, Interval.HOURLY) for sym in ("AMZN", "GOOG")
            for kind in (PatternKind.IMPULSE4, PatternKind.IMPULSE5)]
    text = format_results(rows, "text", layout="table")
    assert text.index("Daily Interval") < text.index("Hourly Interval")
    md = format_results(rows, "markdown", layout="table")
    assert md.splitlines()[0].count("|") == 8
    table = list(csv.reader(io.StringIO(format_results(rows, "csv", layout="table"))))
    assert table[0][1:] == ["Stock", "1-2-3-4 N", "1-2-3-4 Without", "1-2-3-4 With",
                            "1-2-3-4-5 N", "1-2-3-4-5 Without", "1-2-3-4-5 With"]
    assert len(table) == 5
    path = write_results(rows, tmp_path, "exp")
    assert path.read_text() == format_results(rows, "csv")


def test_experiment_ini():
    text = """
[experiment]
name = demo
symbols = amzn, goog
interval = 1h
sample_count = 500
completeness = Incomplete4
train_end = 2021-01-01
eval_start = 2021-01-01

[engine]
seed = 4

[hourly]
swing_threshold = 0.004
"""
    exp, engine = ExperimentConfig.from_ini(text)
    assert exp.symbols == ("AMZN", "GOOG") and exp.interval is Interval.HOURLY
    assert exp.completeness == (Completeness.INCOMPLETE4,)
    assert exp.train_range == (None, 1609459200) and exp.eval_range == (1609459200, None)
    assert engine.seed == 4 and engine.swing_threshold_hourly == 0.004
    with pytest.raises(ConfigError):
        ExperimentConfig.from_ini("[engine]\nseed = 1\n")
