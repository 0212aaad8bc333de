"""Seven-role analysis pipeline with a single sequencing coordinator.

Roles exchange immutable messages along a fixed flow graph. Wave analysis
and the backtester's knowledge lookup have no data dependency and run
concurrently; their messages are merged into the transcript in role-name
order so logs are reproducible.
"""

from __future__ import annotations

import hashlib
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path

from .chart import render_chart
from .config import GlobalConfig
from .enums import Completeness, Signal
from .exceptions import DataLoadError, WaveDeskError
from .forecast import Forecast, Scenario, make_forecast
from .knowledge import KnowledgeStore
from .learn import (
    KnowledgeIndex,
    KnowledgeRecord,
    adjust_forecast,
    collect_samples,
    forecast_key,
    train_q_table,
)
from .market_data import CandleSeries, Interval, LocalFileFetcher, to_csv
from .swings import SwingSequence, detect_swings
from .waves import CorrectivePattern, ImpulsePattern, find_corrective, find_impulse

logger = logging.getLogger(__name__)


class Role(str, Enum):
    COORDINATOR = "Coordinator"
    DATA_ENGINEER = "DataEngineer"
    WAVE_ANALYST = "WaveAnalyst"
    BACKTESTER = "Backtester"
    TA_EXPERT = "TAExpert"
    ADVISOR = "Advisor"
    REPORT_WRITER = "ReportWriter"


# (from, to) -> payload type allowed on that edge
FLOW_GRAPH = {
    (Role.COORDINATOR, Role.DATA_ENGINEER): "AnalysisRequest",
    (Role.DATA_ENGINEER, Role.COORDINATOR): "MarketData",
    (Role.COORDINATOR, Role.WAVE_ANALYST): "CandleSeries",
    (Role.COORDINATOR, Role.BACKTESTER): "BacktestQuery",
    (Role.WAVE_ANALYST, Role.TA_EXPERT): "PatternSet",
    (Role.BACKTESTER, Role.TA_EXPERT): "KnowledgeBatch",
    (Role.TA_EXPERT, Role.ADVISOR): "Assessment",
    (Role.ADVISOR, Role.REPORT_WRITER): "Strategy",
    (Role.REPORT_WRITER, Role.COORDINATOR): "Report",
}


class StageError(WaveDeskError):
    def __init__(self, role: Role, message: str):
        self.role = role
        super().__init__(f"{role.value}: {message}")


def _parse_time(value) -> int:
    if isinstance(value, (int, float)):
        return int(value)
    dt = datetime.fromisoformat(str(value))
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return int(dt.timestamp())


@dataclass(frozen=True)
class AnalysisRequest:
    symbol: str
    interval: Interval
    start: int
    end: int
    config: GlobalConfig = field(default_factory=GlobalConfig)

    def __post_init__(self):
        object.__setattr__(self, "interval", Interval.parse(self.interval))
        object.__setattr__(self, "start", _parse_time(self.start))
        object.__setattr__(self, "end", _parse_time(self.end))
        object.__setattr__(self, "symbol", self.symbol.upper())
        if not self.start < self.end:
            raise ValueError("request start must precede end")

    def to_dict(self) -> dict:
        return {"symbol": self.symbol, "interval": self.interval.value, "start": self.start,
                "end": self.end, "config": self.config.to_dict()}

    @classmethod
    def from_dict(cls, d: dict) -> "AnalysisRequest":
        return cls(d["symbol"], Interval.parse(d["interval"]), int(d["start"]), int(d["end"]),
                   GlobalConfig.from_dict(d["config"]))

    @property
    def run_id(self) -> str:
        payload = json.dumps(self.to_dict(), sort_keys=True)
        return f"{self.symbol.lower()}-{self.interval.value}-{hashlib.sha256(payload.encode()).hexdigest()[:12]}"


# ---------------------------------------------------------------------------
# Payloads
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MarketData:
    window: CandleSeries
    history: CandleSeries


@dataclass(frozen=True)
class BacktestQuery:
    symbol: str
    history: CandleSeries
    fingerprint: str
    enabled: bool


@dataclass(frozen=True)
class PatternSet:
    swings: SwingSequence
    impulses: tuple[ImpulsePattern, ...]
    correctives: tuple[tuple[str, CorrectivePattern], ...]  # (impulse id, correction)


@dataclass(frozen=True)
class KnowledgeBatch:
    records: tuple[KnowledgeRecord, ...]
    cache_hit: bool
    episodes_run: int
    note: str = ""


@dataclass(frozen=True)
class Candidate:
    impulse: ImpulsePattern
    corrective: CorrectivePattern | None

    @property
    def id(self) -> str:
        return self.impulse.id + (f"+{self.corrective.id}" if self.corrective else "")

    @property
    def conformance(self) -> float:
        if self.corrective is None:
            return self.impulse.fib.conformance_score
        return (self.impulse.fib.conformance_score + self.corrective.fib.conformance_score) / 2

    @property
    def duration(self) -> int:
        end = self.corrective.end_index if self.corrective else self.impulse.end_index
        return end - self.impulse.start_index

    def rank(self) -> tuple:
        return (-self.conformance, -self.duration, self.impulse.start_index)


@dataclass(frozen=True)
class Assessment:
    candidates: tuple[Candidate, ...]
    raw: tuple[Forecast, ...]
    adjusted: tuple[Forecast, ...]


@dataclass(frozen=True)
class Strategy:
    forecast: Forecast | None
    raw: Forecast | None
    candidate: Candidate | None
    verdict: str


@dataclass(frozen=True)
class Report:
    summary: str
    signals: tuple[tuple, ...]
    risks: str
    chart_path: str
    markdown: str


@dataclass(frozen=True)
class AgentMessage:
    run_id: str
    sequence: int
    from_role: Role
    to_role: Role
    payload: object

    def __post_init__(self):
        expected = FLOW_GRAPH.get((self.from_role, self.to_role))
        if expected is None:
            raise ValueError(f"edge {self.from_role.value} -> {self.to_role.value} is not in the flow graph")
        if type(self.payload).__name__ != expected:
            raise ValueError(f"edge {self.from_role.value} -> {self.to_role.value} carries {expected}, "
                             f"not {type(self.payload).__name__}")

    def to_dict(self) -> dict:
        return {"run_id": self.run_id, "sequence": self.sequence, "from": self.from_role.value,
                "to": self.to_role.value, "payload_type": type(self.payload).__name__,
                "payload": summarize(self.payload)}


@dataclass(frozen=True)
class AnalysisBundle:
    run_id: str
    request: AnalysisRequest
    series: CandleSeries
    swings: SwingSequence
    impulses: tuple[ImpulsePattern, ...]
    correctives: tuple[CorrectivePattern, ...]
    candidates: tuple[Candidate, ...]
    raw_forecasts: tuple[Forecast, ...]
    adjusted_forecasts: tuple[Forecast, ...]
    kb_records: tuple[KnowledgeRecord, ...]
    transcript: tuple[AgentMessage, ...] = ()

    @property
    def selected(self) -> Candidate | None:
        return self.candidates[0] if self.candidates else None

    def chart_patterns(self) -> list:
        return list(self.impulses) + list(self.correctives)

    def to_dict(self) -> dict:
        return {
            "run_id": self.run_id,
            "request": self.request.to_dict(),
            "series": summarize(self.series),
            "swings": [_pivot(p) for p in self.swings],
            "impulses": [_pattern(p) for p in self.impulses],
            "correctives": [_pattern(p) for p in self.correctives],
            "candidates": [c.id for c in self.candidates],
            "raw_forecasts": [_forecast(f) for f in self.raw_forecasts],
            "adjusted_forecasts": [_forecast(f) for f in self.adjusted_forecasts],
            "kb_records": [r.to_dict() for r in self.kb_records],
        }


# ---------------------------------------------------------------------------
# Serialization helpers
# ---------------------------------------------------------------------------

def _pivot(p) -> dict:
    return {"index": p.candle_index, "price": p.price, "kind": p.kind.value,
            "confirmed_at": p.confirmed_at}


def _pattern(p) -> dict:
    d = {"id": p.id, "kind": p.kind.value, "direction": p.direction.value,
         "waves": [{"label": w.label.value, "start": w.start.candle_index, "end": w.end.candle_index,
                    "start_price": w.start.price, "end_price": w.end.price,
                    "price_length": w.price_length, "duration": w.duration} for w in p.waves],
         "fib": {**p.fib.ratios(), "conformance_score": p.fib.conformance_score}}
    rules = getattr(p, "rules", None)
    if rules is not None:
        d["rules"] = {"rule2_no_full_retrace": rules.rule2_no_full_retrace,
                      "rule3_not_shortest": rules.rule3_not_shortest,
                      "rule4_no_overlap": rules.rule4_no_overlap,
                      "w3_dominance": rules.w3_dominance,
                      "all_hard_rules_pass": rules.all_hard_rules_pass}
    return d


def _forecast(f: Forecast) -> dict:
    return {"pattern_id": f.pattern_id, "direction": f.direction.value, "signal": f.signal.value,
            "entry": f.entry, "primary_target": f.primary_target,
            "secondary_target": f.secondary_target, "stop_loss": f.stop_loss,
            "horizon_candles": f.horizon_candles, "issued_at_index": f.issued_at_index,
            "scenario": f.scenario.value, "note": f.note}


def summarize(payload) -> dict:
    """JSON-safe digest of a message payload for transcripts."""
    if isinstance(payload, AnalysisRequest):
        return payload.to_dict()
    if isinstance(payload, CandleSeries):
        digest = hashlib.sha256(to_csv(payload).encode()).hexdigest()[:16]
        first = payload.candles[0].timestamp if len(payload) else None
        last = payload.candles[-1].timestamp if len(payload) else None
        return {"symbol": payload.symbol, "interval": payload.interval.value, "candles": len(payload),
                "first": first, "last": last, "sha256": digest}
    if isinstance(payload, MarketData):
        return {"window": summarize(payload.window), "history": summarize(payload.history)}
    if isinstance(payload, BacktestQuery):
        return {"symbol": payload.symbol, "history": summarize(payload.history),
                "fingerprint": payload.fingerprint, "enabled": payload.enabled}
    if isinstance(payload, PatternSet):
        return {"swings": len(payload.swings), "impulses": [p.id for p in payload.impulses],
                "correctives": [c.id for _, c in payload.correctives]}
    if isinstance(payload, KnowledgeBatch):
        return {"records": len(payload.records), "cache_hit": payload.cache_hit,
                "episodes_run": payload.episodes_run, "note": payload.note}
    if isinstance(payload, Assessment):
        return {"candidates": [c.id for c in payload.candidates],
                "raw": [_forecast(f) for f in payload.raw],
                "adjusted": [_forecast(f) for f in payload.adjusted]}
    if isinstance(payload, Strategy):
        return {"verdict": payload.verdict,
                "forecast": _forecast(payload.forecast) if payload.forecast else None}
    if isinstance(payload, Report):
        return {"summary": payload.summary, "signals": len(payload.signals),
                "chart_path": payload.chart_path,
                "sha256": hashlib.sha256(payload.markdown.encode()).hexdigest()[:16]}
    raise TypeError(f"cannot summarize {type(payload).__name__}")


# ---------------------------------------------------------------------------
# Stages
# ---------------------------------------------------------------------------

def data_engineer(request: AnalysisRequest, fetcher) -> MarketData:
    try:
        full = fetcher.load(request.symbol, request.interval)
    except WaveDeskError as exc:
        raise StageError(Role.DATA_ENGINEER, str(exc)) from exc
    except OSError as exc:
        raise StageError(Role.DATA_ENGINEER, f"cannot load data: {exc}") from exc
    window = full.between(request.start, request.end)
    if len(window) == 0:
        raise StageError(Role.DATA_ENGINEER, f"no {request.symbol} candles in the requested range")
    return MarketData(window, full.between(None, request.start))


def _subsumed(p: ImpulsePattern, complete: list[ImpulsePattern]) -> bool:
    """A 1-2-3-4 whose pivots open a detected 1-2-3-4-5."""
    if p.completeness is not Completeness.INCOMPLETE4:
        return False
    return any(c.pivots[:5] == p.pivots for c in complete)


def wave_analyst(series: CandleSeries, config: GlobalConfig) -> PatternSet:
    swings = detect_swings(series, config.threshold_for(series.interval))
    wave_cfg = config.wave_config()
    complete = find_impulse(swings, Completeness.COMPLETE5, wave_cfg)
    incomplete = [p for p in find_impulse(swings, Completeness.INCOMPLETE4, wave_cfg)
                  if not _subsumed(p, complete)]
    impulses = sorted(incomplete + complete, key=lambda p: (p.start_index, p.end_index))
    correctives = []
    for p in complete:
        for c in find_corrective(swings, preceding=p, config=wave_cfg):
            correctives.append((p.id, c))
    return PatternSet(swings, tuple(impulses), tuple(correctives))


def backtester(query: BacktestQuery, config: GlobalConfig, store: KnowledgeStore) -> KnowledgeBatch:
    """Query the store first; train on history only when no run matches."""
    if not query.enabled:
        return KnowledgeBatch((), False, 0, "backtesting disabled")
    if store.training_run(query.symbol, query.fingerprint) is not None:
        return KnowledgeBatch(tuple(store.records(query.symbol)), True, 0, "knowledge base hit")
    history = query.history
    if len(history) == 0:
        return KnowledgeBatch(tuple(store.records(query.symbol)), False, 0, "no history before the window")
    samples = collect_samples(history, config.wave_config(), **config.sample_options(history.interval))
    result = train_q_table(samples, config.train_params(), int(history.candles[-1].timestamp))
    for record in result.records:
        store.store(record)
    store.mark_trained(query.symbol, query.fingerprint, episodes=result.episodes,
                       records=len(result.records), trained_through=int(history.candles[-1].timestamp))
    return KnowledgeBatch(tuple(store.records(query.symbol)), False, result.episodes,
                          f"trained on {len(history)} candles, {result.samples} samples")


def ta_expert(series: CandleSeries, patterns: PatternSet, knowledge: KnowledgeBatch,
              config: GlobalConfig) -> Assessment:
    """Rank actionable scenarios and attach raw and history-adjusted forecasts.

    A scenario is actionable when it ends on the latest confirmed pivot.
    """
    confirmed = patterns.swings.confirmed
    if not confirmed:
        return Assessment((), (), ())
    frontier = confirmed[-1].candle_index
    by_id = {p.id: p for p in patterns.impulses}
    candidates = [Candidate(p, None) for p in patterns.impulses if p.end_index == frontier]
    candidates += [Candidate(by_id[pid], c) for pid, c in patterns.correctives if c.end_index == frontier]
    candidates.sort(key=Candidate.rank)
    index = KnowledgeIndex(knowledge.records)
    raw, adjusted = [], []
    for cand in candidates:
        forecast = make_forecast(cand.impulse, series, corrective=cand.corrective,
                                 horizon_mode=config.horizon_mode)
        raw.append(forecast)
        if config.backtest:
            key = forecast_key(cand.impulse, forecast, series, config.trend_window)
            forecast = adjust_forecast(forecast, key, index, config.min_hit_rate)
        adjusted.append(forecast)
    return Assessment(tuple(candidates), tuple(raw), tuple(adjusted))


def advisor(assessment: Assessment) -> Strategy:
    if not assessment.candidates:
        return Strategy(None, None, None, "no actionable pattern")
    forecast = assessment.adjusted[0]
    verdict = {Signal.BUY: "buy", Signal.SELL: "sell", Signal.HOLD: "hold"}[forecast.signal]
    return Strategy(forecast, assessment.raw[0], assessment.candidates[0], verdict)


SCENARIO_TEXT = {
    Scenario.CONTINUATION: "an incomplete 1-2-3-4 impulse; a fifth wave in the trend direction is expected",
    Scenario.REVERSAL: "a complete 1-2-3-4-5 impulse; a corrective wave A against the trend is expected",
    Scenario.POST_CORRECTION: "a complete 1-2-3-4-5 impulse followed by an A-B-C correction; "
                              "a new advance beyond the wave-5 extreme is expected",
}


def _money(x) -> str:
    return "-" if x is None else f"{x:.2f}"


def write_report(bundle: AnalysisBundle, strategy: Strategy | None = None,
                 chart_path: str = "chart.svg") -> Report:
    """Markdown report: summary, patterns, signals, risks, chart reference."""
    req = bundle.request
    series = bundle.series
    if strategy is None:
        strategy = advisor(Assessment(bundle.candidates, bundle.raw_forecasts, bundle.adjusted_forecasts))
    first = datetime.fromtimestamp(series.candles[0].timestamp, timezone.utc).date()
    last = datetime.fromtimestamp(series.candles[-1].timestamp, timezone.utc).date()
    if strategy.forecast is None:
        summary = (f"{req.symbol} {req.interval.label} {first} to {last}: no actionable pattern. "
                   f"{len(bundle.impulses)} impulse pattern(s) detected, none ending on the latest "
                   f"confirmed swing.")
    else:
        f = strategy.forecast
        summary = (f"{req.symbol} {req.interval.label} {first} to {last}: {f.signal.value.upper()} "
                   f"based on {SCENARIO_TEXT[f.scenario]}.")
        if f.signal is Signal.HOLD and strategy.raw is not None and strategy.raw.signal is not Signal.HOLD:
            summary += f" The raw {strategy.raw.signal.value} signal was held: {f.note}."

    lines = [f"# {req.symbol} wave analysis", "", "## Summary", "", summary, "",
             "## Detected Patterns", ""]
    if not bundle.impulses and not bundle.correctives:
        lines.append("none")
    for p in bundle.chart_patterns():
        waves = ", ".join(f"{w.label.short}: {_money(w.start.price)} -> {_money(w.end.price)}"
                          for w in p.waves)
        lines.append(f"- `{p.id}` ({p.direction.value}, Fibonacci conformance "
                     f"{p.fib.conformance_score:.2f}): {waves}")
    lines += ["", "## Signals", ""]
    signals = []
    for f in bundle.adjusted_forecasts:
        targets = _money(f.primary_target)
        if f.secondary_target is not None:
            targets += f" / {_money(f.secondary_target)}"
        signals.append((f.signal.value, _money(f.entry), targets, _money(f.stop_loss),
                        str(f.horizon_candles), f.pattern_id))
    if signals:
        lines += ["| Signal | Entry | Targets | Stop-loss | Horizon (candles) | Pattern |",
                  "|---|---|---|---|---|---|"]
        lines += ["| " + " | ".join(row) + " |" for row in signals]
        f = bundle.adjusted_forecasts[0]
        if f.secondary_target is not None:
            lines += ["", f"Primary target {_money(f.primary_target)} is the wave-5 extreme; "
                          f"secondary target {_money(f.secondary_target)} is the wave-B resistance."]
    else:
        lines.append("none")
    risks = ("Wave counts are detected at a single degree with a "
             f"{req.config.threshold_for(req.interval):.3%} swing threshold; a different threshold can "
             "change the count. Forecasts whose horizon runs past the available data cannot be "
             "evaluated and are excluded from accuracy statistics. Fibonacci conformance uses a "
             f"tolerance window of {req.config.fib_tolerance:g} per ratio and the wave-A symmetry "
             f"check a tolerance of {req.config.symmetry_tolerance:.0%}. Past pattern reliability "
             "does not guarantee future behaviour.")
    lines += ["", "## Risks and Limitations", "", risks, "", "## Chart", "",
              f"![wave chart]({chart_path})", ""]
    return Report(summary, tuple(signals), risks, chart_path, "\n".join(lines))


# ---------------------------------------------------------------------------
# Coordinator
# ---------------------------------------------------------------------------

class _Transcript:
    def __init__(self, run_id: str):
        self.run_id = run_id
        self.messages: list[AgentMessage] = []

    def send(self, src: Role, dst: Role, payload) -> AgentMessage:
        msg = AgentMessage(self.run_id, len(self.messages) + 1, src, dst, payload)
        self.messages.append(msg)
        return msg


def backtest_fingerprint(request: AnalysisRequest, history: CandleSeries) -> str:
    parts = {"symbol": request.symbol, "interval": request.interval.value,
             "history": summarize(history), "config": request.config.fingerprint()}
    return hashlib.sha256(json.dumps(parts, sort_keys=True).encode()).hexdigest()[:16]


def run_analysis(request: AnalysisRequest, *, fetcher=None, store: KnowledgeStore | None = None,
                 out_dir: "str | Path | None" = None) -> tuple[AnalysisBundle, Report]:
    """Run all seven roles for one request.

    Artifacts (``report.md``, ``chart.svg``, ``transcript.jsonl``,
    ``bundle.json``) are written to ``out_dir/<run_id>/`` when ``out_dir`` is
    given.
    """
    config = request.config
    fetcher = fetcher or LocalFileFetcher(config.resolved_data_dir())
    store = store or KnowledgeStore(config.store_dir)
    run_id = request.run_id
    log = _Transcript(run_id)

    log.send(Role.COORDINATOR, Role.DATA_ENGINEER, request)
    data = data_engineer(request, fetcher)
    log.send(Role.DATA_ENGINEER, Role.COORDINATOR, data)

    query = BacktestQuery(request.symbol, data.history, backtest_fingerprint(request, data.history),
                          config.backtest)
    log.send(Role.COORDINATOR, Role.WAVE_ANALYST, data.window)
    log.send(Role.COORDINATOR, Role.BACKTESTER, query)
    with ThreadPoolExecutor(max_workers=2, thread_name_prefix="stage") as pool:
        waves_future = pool.submit(wave_analyst, data.window, config)
        kb_future = pool.submit(backtester, query, config, store)
        patterns = waves_future.result()
        knowledge = kb_future.result()
    # deterministic merge: role-name order
    for role, payload in sorted([(Role.WAVE_ANALYST, patterns), (Role.BACKTESTER, knowledge)],
                                key=lambda item: item[0].value):
        log.send(role, Role.TA_EXPERT, payload)

    assessment = ta_expert(data.window, patterns, knowledge, config)
    log.send(Role.TA_EXPERT, Role.ADVISOR, assessment)
    strategy = advisor(assessment)
    log.send(Role.ADVISOR, Role.REPORT_WRITER, strategy)

    bundle = AnalysisBundle(
        run_id, request, data.window, patterns.swings, patterns.impulses,
        tuple(c for _, c in patterns.correctives), assessment.candidates, assessment.raw,
        assessment.adjusted, knowledge.records)
    report = write_report(bundle, strategy)
    log.send(Role.REPORT_WRITER, Role.COORDINATOR, report)
    bundle = AnalysisBundle(**{**bundle.__dict__, "transcript": tuple(log.messages)})

    if out_dir is not None:
        write_artifacts(bundle, report, Path(out_dir) / run_id)
    return bundle, report


def write_artifacts(bundle: AnalysisBundle, report: Report, directory: Path) -> Path:
    directory.mkdir(parents=True, exist_ok=True)
    (directory / "report.md").write_text(report.markdown, encoding="utf-8")
    (directory / "chart.svg").write_text(render_chart(bundle.series, bundle), encoding="utf-8")
    (directory / "transcript.jsonl").write_text(
        "".join(json.dumps(m.to_dict(), sort_keys=True) + "\n" for m in bundle.transcript),
        encoding="utf-8")
    (directory / "bundle.json").write_text(json.dumps(bundle.to_dict(), sort_keys=True, indent=2) + "\n",
                                           encoding="utf-8")
    return directory


def load_request(transcript_path: "str | Path") -> AnalysisRequest:
    """Recover the request from the first message of a persisted transcript."""
    with open(transcript_path, encoding="utf-8") as fh:
        first = json.loads(fh.readline())
    if first.get("payload_type") != "AnalysisRequest":
        raise ValueError("transcript does not start with an AnalysisRequest")
    return AnalysisRequest.from_dict(first["payload"])
