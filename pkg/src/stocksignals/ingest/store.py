"""On-disk corpus: one JSONL shard per (ticker, source, date) plus a manifest.

Writes go to a temporary file that is fsync'ed and renamed into place;
shards are replaced before the manifest, and opening a store rebuilds the
manifest from the shards if the two disagree (e.g. after a crash between
the renames).
"""

from __future__ import annotations

import datetime as dt
import hashlib
import json
import logging
import os
import re
from collections import defaultdict
from pathlib import Path
from typing import Iterable, Iterator

from ..textprep.pipeline import TextDocument

log = logging.getLogger(__name__)

MANIFEST = "manifest.json"


def normalized_hash(text: str) -> str:
    norm = " ".join(text.casefold().split())
    return hashlib.sha256(norm.encode("utf-8")).hexdigest()


def _dumps(rec: dict) -> str:
    return json.dumps(rec, ensure_ascii=False, separators=(", ", ": "))


def _atomic_write(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(data)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


class CorpusStore:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.shard_root = self.root / "shards"
        self.shard_root.mkdir(parents=True, exist_ok=True)
        self.manifest = self._recover()

    def shard_path(self, ticker: str, source: str, date: dt.date) -> Path:
        return self.shard_root / ticker / source / f"{date.isoformat()}.jsonl"

    def _key(self, path: Path) -> str:
        return path.relative_to(self.root).as_posix()

    @staticmethod
    def _describe(data: bytes) -> dict:
        return {"count": data.count(b"\n"), "hash": hashlib.sha256(data).hexdigest()}

    def _scan(self) -> dict:
        for tmp in self.shard_root.rglob("*.tmp"):
            tmp.unlink()
        return {self._key(p): self._describe(p.read_bytes()) for p in sorted(self.shard_root.rglob("*.jsonl"))}

    def _recover(self) -> dict:
        actual = self._scan()
        mpath = self.root / MANIFEST
        try:
            recorded = json.loads(mpath.read_text(encoding="utf-8"))
        except (FileNotFoundError, json.JSONDecodeError):
            recorded = None
        if recorded != actual:
            if recorded is not None:
                log.warning("manifest out of sync with shards; rebuilding")
            self._write_manifest(actual)
        return actual

    def _write_manifest(self, manifest: dict) -> None:
        data = json.dumps(manifest, indent=2, sort_keys=True) + "\n"
        _atomic_write(self.root / MANIFEST, data.encode("utf-8"))

    def read_shard(self, path: Path) -> list[dict]:
        if not path.exists():
            return []
        return [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines() if line.strip()]

    def add(self, docs: Iterable[TextDocument]) -> int:
        """Append documents, dropping normalised-text duplicates per shard."""
        by_shard: dict[Path, list[TextDocument]] = defaultdict(list)
        for d in docs:
            by_shard[self.shard_path(d.ticker, d.source, d.date)].append(d)
        stored = 0
        for path in sorted(by_shard):
            existing = self.read_shard(path)
            seen = {normalized_hash(r["text"]) for r in existing}
            lines = [_dumps(r) for r in existing]
            before = len(lines)
            for d in by_shard[path]:
                h = normalized_hash(d.text)
                if h in seen:
                    continue
                seen.add(h)
                lines.append(_dumps(d.to_record()))
            if len(lines) == before:
                continue
            data = ("\n".join(lines) + "\n").encode("utf-8")
            _atomic_write(path, data)
            self.manifest[self._key(path)] = self._describe(data)
            stored += len(lines) - before
        self._write_manifest(self.manifest)
        return stored

    def documents(self, ticker: str | None = None, source: str | None = None,
                  start: dt.date | None = None, end: dt.date | None = None) -> Iterator[TextDocument]:
        """Stored documents in shard order (ticker, source, date), then insertion order."""
        pat = re.compile(r"shards/([^/]+)/([^/]+)/(\d{4}-\d{2}-\d{2})\.jsonl$")
        for key in sorted(self.manifest):
            m = pat.match(key)
            if not m:
                continue
            t, s, d = m.group(1), m.group(2), dt.date.fromisoformat(m.group(3))
            if (ticker and t != ticker) or (source and s != source):
                continue
            if (start and d < start) or (end and d > end):
                continue
            for rec in self.read_shard(self.root / key):
                yield TextDocument.from_record(rec)

    def count(self) -> int:
        return sum(v["count"] for v in self.manifest.values())


def dedup_store(docs: Iterable[TextDocument], store: CorpusStore) -> int:
    """Store documents, skipping texts already present in their bucket; returns the number stored."""
    return store.add(docs)
