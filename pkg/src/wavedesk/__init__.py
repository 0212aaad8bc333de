"""Elliott wave detection, forecasting and backtesting on OHLCV candles."""

from .config import GlobalConfig
from .enums import Completeness, Direction, PatternKind, Signal
from .estimators import SwingDetector, WaveBacktester, WavePatternDetector
from .exceptions import InsufficientDataError, WaveDeskError
from .forecast import Forecast, evaluate, evaluate_complete, evaluate_incomplete, horizon, make_forecast
from .harness import ExperimentConfig, ResultRow, format_results, run_crossval
from .knowledge import KnowledgeStore, kb_lookup, kb_store
from .learn import QTable, StateKey, TrainParams, adjust_forecast, q_update, train_q_table
from .market_data import (Candle, CandleSeries, Interval, SynthSpec, parse_candles, resample,
                          synth_series)
from .pipeline import AnalysisRequest, run_analysis
from .swings import SwingPoint, SwingSequence, detect_swings
from .waves import (CorrectivePattern, FibAssessment, ImpulsePattern, WaveConfig, assess_fibonacci,
                    fib_level, find_corrective, find_impulse)
from .chart import render_chart

__version__ = "0.1.0"

__all__ = [
    "AnalysisRequest", "Candle", "CandleSeries", "Completeness", "CorrectivePattern", "Direction",
    "ExperimentConfig", "FibAssessment", "Forecast", "GlobalConfig", "ImpulsePattern",
    "InsufficientDataError", "Interval", "KnowledgeStore", "PatternKind", "QTable", "ResultRow",
    "Signal", "StateKey", "SwingDetector", "SwingPoint", "SwingSequence", "SynthSpec", "TrainParams",
    "WaveBacktester", "WaveConfig", "WaveDeskError", "WavePatternDetector", "adjust_forecast",
    "assess_fibonacci", "detect_swings", "evaluate", "evaluate_complete", "evaluate_incomplete",
    "fib_level", "find_corrective", "find_impulse", "format_results", "horizon", "kb_lookup",
    "kb_store", "make_forecast", "parse_candles", "q_update", "render_chart", "resample",
    "run_analysis", "run_crossval", "synth_series", "train_q_table",
]
