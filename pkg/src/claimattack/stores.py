"""Line-delimited JSON stores.

Every pipeline artifact is an append-only ``.jsonl`` file: one record per
line, UTF-8, keys sorted so that identical records serialize to identical
bytes. Stages resume by loading the keys already present and appending
only what is missing, which keeps interrupted runs safe to re-run.
"""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Callable, Iterable, Iterator


def dumps(record: dict) -> str:
    return json.dumps(record, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


def read_jsonl(path: str | Path) -> Iterator[dict]:
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                yield json.loads(line)


def load_jsonl(path: str | Path) -> list[dict]:
    return list(read_jsonl(path))


def write_jsonl(path: str | Path, records: Iterable[dict]) -> int:
    """Write records atomically (tmp file + rename). Returns record count."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    n = 0
    with open(tmp, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(dumps(rec))
            fh.write("\n")
            n += 1
    os.replace(tmp, path)
    return n


class AppendStore:
    """Single-writer append log keyed for resume.

    ``key_fn`` maps a record to a hashable identity; appending a record
    whose key is already present is a no-op, so re-running a stage over
    unchanged inputs leaves the file byte-identical.
    """

    def __init__(self, path: str | Path, key_fn: Callable[[dict], tuple]):
        self.path = Path(path)
        self.key_fn = key_fn
        self._keys: set[tuple] = set()
        if self.path.exists():
            for rec in read_jsonl(self.path):
                self._keys.add(key_fn(rec))
        self.path.parent.mkdir(parents=True, exist_ok=True)

    def __contains__(self, key: tuple) -> bool:
        return key in self._keys

    def __len__(self) -> int:
        return len(self._keys)

    def append(self, record: dict) -> bool:
        """Append unless the record's key is already stored."""
        key = self.key_fn(record)
        if key in self._keys:
            return False
        with open(self.path, "a", encoding="utf-8") as fh:
            fh.write(dumps(record))
            fh.write("\n")
        self._keys.add(key)
        return True

    def extend(self, records: Iterable[dict]) -> int:
        n = 0
        for rec in records:
            if self.append(rec):
                n += 1
        return n

    def records(self) -> list[dict]:
        if not self.path.exists():
            return []
        return load_jsonl(self.path)
