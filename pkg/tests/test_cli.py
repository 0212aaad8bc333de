import io

import pytest

from wavedesk.cli import main
from wavedesk.config import PACKAGE_FIXTURES
from wavedesk.market_data import parse_candles


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.setenv("ELLIOTT_DATA_DIR", str(PACKAGE_FIXTURES))
    return tmp_path


def run(*argv):
    out = io.StringIO()
    return main(list(argv), out=out), out.getvalue()


def test_no_arguments_is_usage(workdir, capsys):
    code, _ = run()
    assert code == 1
    assert "usage" in capsys.readouterr().err


def test_unknown_flag_is_usage(workdir, capsys):
    code, _ = run("analyze", "AAPL", "--bogus")
    assert code == 1
    assert "usage" in capsys.readouterr().err


def test_analyze_apple_writes_signals_table(workdir):
    code, out = run("analyze", "AAPL")
    assert code == 0
    reports = list((workdir / "runs").glob("*/report.md"))
    assert len(reports) == 1
    text = reports[0].read_text()
    assert "| Signal | Entry | Targets |" in text and "| Buy | 232.00 | 250.00 / 225.00 |" in text
    assert "Buy" in out


def test_analyze_date_window_and_no_backtest(workdir):
    code, _ = run("analyze", "AAPL", "--from", "2021-09-27", "--to", "2022-09-27", "--no-backtest")
    assert code == 0
    assert not (workdir / "kb").exists()


def test_missing_data_exits_2(workdir):
    assert run("analyze", "ZZZZ")[0] == 2
    assert run("backtest", "ZZZZ")[0] == 2


def test_env_data_dir(workdir, monkeypatch, tmp_path):
    empty = tmp_path / "empty"
    empty.mkdir()
    monkeypatch.setenv("ELLIOTT_DATA_DIR", str(empty))
    assert run("analyze", "AAPL")[0] == 2


def test_backtest_then_cache_hit(workdir):
    code, out = run("backtest", "AMZN")
    assert code == 0 and "episodes run" in out
    assert (workdir / "kb" / "AMZN.jsonl").exists()
    _, again = run("backtest", "AMZN")
    assert "0 episodes run" in again and "hit" in again


def test_simulate_deterministic(workdir):
    assert run("simulate", "--seed", "42", "--out", "a.csv")[0] == 0
    assert run("simulate", "--seed", "42", "--out", "b.csv")[0] == 0
    assert (workdir / "a.csv").read_bytes() == (workdir / "b.csv").read_bytes()
    run("simulate", "--seed", "42")
    assert (workdir / "sim_42.csv").read_bytes() == (workdir / "a.csv").read_bytes()


def test_simulate_spec_file(workdir):
    (workdir / "spec.ini").write_text(
        "[synth]\npattern_kind = Impulse4\ndirection = down\nwave1_length = 5\nnoise = 0.2\n"
        "candles_per_wave = 4, 5, 6, 7\n")
    code, out = run("simulate", "--spec", "spec.ini", "--seed", "1", "--out", "s.csv")
    assert code == 0 and '"Down"' in out
    series = parse_candles((workdir / "s.csv").read_text(), "1d")
    assert len(series) == 4 + 5 + 6 + 7 + 1
    (workdir / "bad.ini").write_text("[synth]\nwhat = 1\n")
    assert run("simulate", "--spec", "bad.ini")[0] == 1


def test_render_existing_run(workdir):
    run("analyze", "AAPL")
    run_dir = next((workdir / "runs").iterdir())
    original = (run_dir / "chart.svg").read_bytes()
    code, _ = run("render", "--run", run_dir.name, "--out", "again.svg")
    assert code == 0
    assert (workdir / "again.svg").read_bytes() == original
    assert run("render", "--run", "nope")[0] == 2


def test_crossval_writes_results(workdir):
    (workdir / "exp.ini").write_text(
        "[experiment]\nname = pair\nsymbols = AMZN, GOOG\nsample_count = 1000\n")
    code, out = run("crossval", "--config", "exp.ini")
    assert code == 0
    assert "1-2-3-4" in out
    first = (workdir / "results" / "pair.csv").read_bytes()
    run("crossval", "--config", "exp.ini")
    assert (workdir / "results" / "pair.csv").read_bytes() == first
    assert run("crossval")[0] == 1
    (workdir / "bad.ini").write_text("[experiment]\nsymbols = A\n[engine]\nalpha = x\n")
    assert run("crossval", "--config", "bad.ini")[0] == 1
