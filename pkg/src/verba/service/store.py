"""JSON file persistence for sessions and lexicons.

One file per record under the data directory. Writes go through a temp file
and an atomic rename, so a crash between any two API calls leaves either the
old or the new state, never a torn file. Floats survive the JSON round trip
bit-exactly (shortest-repr encoding).
"""

from __future__ import annotations

import json
import os
import re
import threading
import uuid
from pathlib import Path
from typing import Optional

_SAFE_NAME = re.compile(r"^[A-Za-z0-9._-]+$")


def _check_name(name: str) -> str:
    if not _SAFE_NAME.match(name):
        raise ValueError(f"unsafe store key {name!r}")
    return name


def _atomic_write_json(path: Path, data: dict) -> None:
    tmp = path.with_suffix(".tmp")
    tmp.write_text(json.dumps(data, sort_keys=True, separators=(",", ":")), encoding="utf-8")
    os.replace(tmp, path)


class _Locks:
    """Per-key in-process locks; mutations on one record are single-writer."""

    def __init__(self) -> None:
        self._guard = threading.Lock()
        self._locks: dict[str, threading.Lock] = {}

    def get(self, key: str) -> threading.Lock:
        with self._guard:
            if key not in self._locks:
                self._locks[key] = threading.Lock()
            return self._locks[key]


class JsonDirStore:
    """Maps string keys to JSON dicts stored as files in one directory."""

    def __init__(self, directory: Path):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self.locks = _Locks()

    def _path(self, key: str) -> Path:
        return self.directory / f"{_check_name(key)}.json"

    def load(self, key: str) -> Optional[dict]:
        path = self._path(key)
        if not path.exists():
            return None
        return json.loads(path.read_text(encoding="utf-8"))

    def save(self, key: str, data: dict) -> None:
        _atomic_write_json(self._path(key), data)

    def keys(self) -> list[str]:
        return sorted(p.stem for p in self.directory.glob("*.json"))

    def lock(self, key: str) -> threading.Lock:
        return self.locks.get(key)


class DataStore:
    """Root data directory holding session and lexicon stores."""

    def __init__(self, root: Path):
        self.root = Path(root)
        self.sessions = JsonDirStore(self.root / "sessions")
        self.lexicons = JsonDirStore(self.root / "lexicons")

    @classmethod
    def from_env(cls, override: Optional[str] = None) -> "DataStore":
        root = override or os.environ.get("VERBA_DATA_DIR") or "verba-data"
        return cls(Path(root))


def new_session_id() -> str:
    return uuid.uuid4().hex[:12]
