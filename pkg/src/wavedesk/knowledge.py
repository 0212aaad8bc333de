"""File-backed, append-only knowledge store (``<root>/<SYMBOL>.jsonl``).

Each line is one JSON object. ``knowledge`` lines carry a
:class:`~wavedesk.learn.KnowledgeRecord`; ``training`` lines mark a completed
training run so repeated requests can skip retraining. On read the newest
line for a key wins and unreadable lines are skipped with a warning.
"""

from __future__ import annotations

import json
import logging
import os
import threading
from pathlib import Path

from .exceptions import StoreError
from .learn import SCHEMA_VERSION, KnowledgeRecord, StateKey

logger = logging.getLogger(__name__)

_locks: dict[Path, threading.Lock] = {}
_locks_guard = threading.Lock()


def _lock_for(path: Path) -> threading.Lock:
    with _locks_guard:
        return _locks.setdefault(path.resolve(), threading.Lock())


def _safe_symbol(symbol: str) -> str:
    if not symbol or any(ch in symbol for ch in "/\\\0") or symbol in (".", ".."):
        raise StoreError(f"unusable symbol {symbol!r}")
    return symbol.upper()


class KnowledgeStore:
    def __init__(self, root: "str | Path"):
        self.root = Path(root)

    def path_for(self, symbol: str) -> Path:
        return self.root / f"{_safe_symbol(symbol)}.jsonl"

    # -- writing -----------------------------------------------------------

    def _append(self, symbol: str, obj: dict) -> None:
        path = self.path_for(symbol)
        line = (json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n").encode("utf-8")
        with _lock_for(path):
            try:
                self.root.mkdir(parents=True, exist_ok=True)
                fd = os.open(path, os.O_WRONLY | os.O_CREAT | os.O_APPEND, 0o644)
                try:
                    # a torn tail from an earlier crash becomes its own (skipped) line
                    size = os.fstat(fd).st_size
                    if size:
                        with open(path, "rb") as fh:
                            fh.seek(size - 1)
                            if fh.read(1) != b"\n":
                                line = b"\n" + line
                    os.write(fd, line)
                    os.fsync(fd)
                finally:
                    os.close(fd)
            except OSError as exc:
                raise StoreError(f"cannot write {path}: {exc}") from exc

    def store(self, record: KnowledgeRecord) -> None:
        self._append(record.key.symbol, record.to_dict())

    def mark_trained(self, symbol: str, fingerprint: str, *, episodes: int, records: int,
                     trained_through: int) -> None:
        self._append(symbol, {"type": "training", "schema_version": SCHEMA_VERSION,
                              "fingerprint": fingerprint, "episodes": episodes,
                              "records": records, "trained_through": trained_through})

    # -- reading -----------------------------------------------------------

    def _lines(self, symbol: str):
        path = self.path_for(symbol)
        try:
            with open(path, "rb") as fh:
                raw = fh.read()
        except FileNotFoundError:
            return
        except OSError as exc:
            raise StoreError(f"cannot read {path}: {exc}") from exc
        for n, line in enumerate(raw.split(b"\n"), start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                if not isinstance(obj, dict):
                    raise ValueError("not an object")
            except ValueError:
                logger.warning("skipping unreadable line %d in %s", n, path)
                continue
            yield n, obj

    def records(self, symbol: str) -> list[KnowledgeRecord]:
        """Newest record per key, ordered by key."""
        latest: dict[StateKey, KnowledgeRecord] = {}
        path = self.path_for(symbol)
        for n, obj in self._lines(symbol):
            if obj.get("type", "knowledge") != "knowledge":
                continue
            try:
                rec = KnowledgeRecord.from_dict(obj)
            except (KeyError, TypeError, ValueError):
                logger.warning("skipping malformed record on line %d in %s", n, path)
                continue
            latest[rec.key] = rec
        return [latest[k] for k in sorted(latest)]

    def lookup(self, key: StateKey) -> KnowledgeRecord | None:
        found = None
        for rec in self.records(key.symbol):
            if rec.key == key:
                found = rec
        return found

    def training_run(self, symbol: str, fingerprint: str) -> dict | None:
        found = None
        for _, obj in self._lines(symbol):
            if obj.get("type") == "training" and obj.get("fingerprint") == fingerprint:
                found = obj
        return found


def kb_store(record: KnowledgeRecord, store: KnowledgeStore) -> None:
    store.store(record)


def kb_lookup(key: StateKey, store: KnowledgeStore) -> KnowledgeRecord | None:
    return store.lookup(key)
