"""Engine configuration: one INI-style file, flat keys plus per-interval sections.

Example::

    [engine]
    fib_tolerance = 0.1
    symmetry_tolerance = 0.1
    min_hit_rate = 0.5

    [daily]
    swing_threshold = 0.02

    [hourly]
    swing_threshold = 0.005
"""

from __future__ import annotations

import configparser
import dataclasses
import hashlib
import io
import json
import os
from dataclasses import dataclass, fields
from pathlib import Path

from .exceptions import ConfigError
from .learn import DEFAULT_TREND_WINDOW, TrainParams
from .market_data import Interval
from .waves import CANONICAL_RATIOS, WaveConfig

PACKAGE_FIXTURES = Path(__file__).with_name("fixtures")
DATA_DIR_ENV = "ELLIOTT_DATA_DIR"

_INTERVAL_SECTIONS = {"daily": Interval.DAILY, "hourly": Interval.HOURLY}


@dataclass(frozen=True)
class GlobalConfig:
    swing_threshold_daily: float = 0.02
    swing_threshold_hourly: float = 0.005
    fib_tolerance: float = 0.10
    require_w3_dominance: bool = True
    canonical_ratios: tuple[float, ...] = CANONICAL_RATIOS
    symmetry_tolerance: float = 0.10
    horizon_mode: str = "candles"
    alpha: float = 0.1
    gamma: float = 0.5
    epsilon: float = 0.1
    episodes: int = 1
    seed: int = 0
    min_hit_rate: float = 0.5
    trend_window: int = DEFAULT_TREND_WINDOW
    backtest: bool = True
    store_dir: str = "kb"
    data_dir: str = ""
    runs_dir: str = "runs"
    results_dir: str = "results"

    def __post_init__(self):
        object.__setattr__(self, "canonical_ratios", tuple(float(r) for r in self.canonical_ratios))
        for name in ("swing_threshold_daily", "swing_threshold_hourly"):
            if not 0 < getattr(self, name) < 1:
                raise ConfigError(f"{name} must lie in (0, 1)")
        if not self.fib_tolerance > 0 or not self.symmetry_tolerance >= 0:
            raise ConfigError("tolerances must be positive")
        if self.horizon_mode not in ("candles", "price"):
            raise ConfigError("horizon_mode must be 'candles' or 'price'")
        if not 0 <= self.min_hit_rate <= 1:
            raise ConfigError("min_hit_rate must lie in [0, 1]")
        if self.trend_window < 1:
            raise ConfigError("trend_window must be >= 1")
        try:
            self.train_params()
            self.wave_config()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    # -- views for the owning modules -------------------------------------

    def threshold_for(self, interval: "Interval | str") -> float:
        interval = Interval.parse(interval)
        return self.swing_threshold_daily if interval is Interval.DAILY else self.swing_threshold_hourly

    def wave_config(self) -> WaveConfig:
        return WaveConfig(self.fib_tolerance, self.require_w3_dominance, self.canonical_ratios)

    def train_params(self) -> TrainParams:
        return TrainParams(self.alpha, self.gamma, self.epsilon, self.episodes, self.seed)

    def sample_options(self, interval: "Interval | str") -> dict:
        return {"threshold": self.threshold_for(interval), "symmetry_tolerance": self.symmetry_tolerance,
                "horizon_mode": self.horizon_mode, "trend_window": self.trend_window}

    def resolved_data_dir(self) -> Path:
        env = os.environ.get(DATA_DIR_ENV)
        if env:
            return Path(env)
        return Path(self.data_dir) if self.data_dir else PACKAGE_FIXTURES

    def fingerprint(self, *names: str) -> str:
        """Stable hash of the named fields (all analysis fields when none given)."""
        skip = {"store_dir", "data_dir", "runs_dir", "results_dir", "backtest"}
        data = self.to_dict()
        keys = names or sorted(k for k in data if k not in skip)
        payload = json.dumps({k: data[k] for k in keys}, sort_keys=True)
        return hashlib.sha256(payload.encode()).hexdigest()[:16]

    def replace(self, **changes) -> "GlobalConfig":
        return dataclasses.replace(self, **{k: v for k, v in changes.items() if v is not None})

    # -- serialization ----------------------------------------------------

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["canonical_ratios"] = list(self.canonical_ratios)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "GlobalConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    def to_ini(self) -> str:
        parser = configparser.ConfigParser()
        engine = {}
        for f in fields(self):
            if f.name.startswith("swing_threshold_"):
                continue
            value = getattr(self, f.name)
            if isinstance(value, tuple):
                value = ", ".join(repr(v) for v in value)
            elif isinstance(value, bool):
                value = "true" if value else "false"
            engine[f.name] = str(value) if not isinstance(value, float) else repr(value)
        parser["engine"] = engine
        parser["daily"] = {"swing_threshold": repr(self.swing_threshold_daily)}
        parser["hourly"] = {"swing_threshold": repr(self.swing_threshold_hourly)}
        buf = io.StringIO()
        parser.write(buf)
        return buf.getvalue()

    @classmethod
    def from_ini(cls, text: str) -> "GlobalConfig":
        parser = configparser.ConfigParser()
        try:
            parser.read_string(text)
        except configparser.Error as exc:
            raise ConfigError(f"unreadable config: {exc}") from None
        types = {f.name: f.type for f in fields(cls)}
        values: dict = {}
        for section in parser.sections():
            if section in _INTERVAL_SECTIONS:
                for key, raw in parser[section].items():
                    if key != "swing_threshold":
                        raise ConfigError(f"unknown key {key!r} in [{section}]")
                    values[f"swing_threshold_{section}"] = _coerce(raw, float, key)
            elif section == "engine":
                for key, raw in parser[section].items():
                    if key not in types:
                        raise ConfigError(f"unknown key {key!r} in [engine]")
                    values[key] = _coerce(raw, types[key], key)
            else:
                raise ConfigError(f"unknown section [{section}]")
        return cls(**values)

    @classmethod
    def load(cls, path: "str | Path | None") -> "GlobalConfig":
        if path is None:
            return cls()
        try:
            return cls.from_ini(Path(path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None


def _coerce(raw: str, typ, key: str):
    raw = raw.strip()
    typ = str(typ)
    try:
        if "bool" in typ:
            lowered = raw.lower()
            if lowered in ("1", "true", "yes", "on"):
                return True
            if lowered in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        if "tuple" in typ:
            return tuple(float(x) for x in raw.split(",") if x.strip())
        if "float" in typ:
            return float(raw)
        if "int" in typ:
            return int(raw)
        return raw
    except ValueError:
        raise ConfigError(f"bad value {raw!r} for {key}") from None
