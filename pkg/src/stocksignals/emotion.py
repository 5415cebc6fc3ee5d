"""Eight-emotion word lexicon and per-day emotion tf-idf vectors.

For a day with ``N`` documents and an emotion ``e``::

    etf(e, doc) = number of tokens in doc tagged with e (repeats counted)
    df(e)       = number of documents with at least one e-tagged token
    idf(e)      = ln(N / (1 + df(e)))
    value(e)    = sum over docs of etf(e, doc) * idf(e)

``idf`` goes negative once ``df >= N``; such values are kept as they are.
"""

from __future__ import annotations

import csv
import datetime as dt
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Callable, Iterable, Mapping, Sequence

EMOTIONS = ("anger", "anticipation", "disgust", "fear", "joy", "sadness", "surprise", "trust")
GOLD_EMOTIONS = ("joy", "anger", "sadness", "fear", "disgust")
_INDEX = {e: i for i, e in enumerate(EMOTIONS)}


class EmotionLexiconError(ValueError):
    pass


def _flags(emotions: Iterable[str]) -> tuple[bool, ...]:
    on = set(emotions)
    unknown = on - set(EMOTIONS)
    if unknown:
        raise EmotionLexiconError(f"unknown emotion(s) {sorted(unknown)}; expected {EMOTIONS}")
    return tuple(e in on for e in EMOTIONS)


@dataclass(frozen=True)
class EmotionLexicon:
    entries: Mapping[str, tuple[bool, ...]]
    emotions: tuple[str, ...] = EMOTIONS

    def __post_init__(self):
        clean = {}
        for word, flags in self.entries.items():
            flags = tuple(bool(f) for f in flags)
            if len(flags) != len(EMOTIONS):
                raise EmotionLexiconError(f"{word!r}: expected {len(EMOTIONS)} flags, got {len(flags)}")
            if not any(flags):
                raise EmotionLexiconError(f"{word!r}: an entry needs at least one emotion flag")
            clean[word.casefold()] = flags
        object.__setattr__(self, "entries", MappingProxyType(clean))

    @classmethod
    def from_emotions(cls, mapping: Mapping[str, Iterable[str]]) -> "EmotionLexicon":
        return cls({w: _flags(es) for w, es in mapping.items()})

    def __len__(self):
        return len(self.entries)

    def __contains__(self, word: str) -> bool:
        return word.casefold() in self.entries

    def emotions_of(self, word: str) -> tuple[str, ...]:
        flags = self.entries.get(word.casefold())
        return () if flags is None else tuple(e for e, f in zip(EMOTIONS, flags) if f)

    def flagged(self, word: str, emotion: str) -> bool:
        flags = self.entries.get(word.casefold())
        return bool(flags and flags[_INDEX[emotion]])


def load_nrc(path: str | Path) -> EmotionLexicon:
    """Read the NRC word-level TSV (``word<TAB>emotion<TAB>0|1``).

    The sentiment rows (``positive``/``negative``) are ignored and words with
    no emotion flag are dropped.
    """
    acc: dict[str, set[str]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            parts = line.rstrip("\n").split("\t")
            if len(parts) != 3 or parts[2].strip() not in ("0", "1"):
                raise EmotionLexiconError(f"{path}:{lineno}: expected 'word<TAB>emotion<TAB>0|1'")
            word, emo, flag = (p.strip() for p in parts)
            if emo not in _INDEX:
                continue
            s = acc.setdefault(word.casefold(), set())
            if flag == "1":
                s.add(emo)
    return EmotionLexicon.from_emotions({w: es for w, es in acc.items() if es})


def load_gold(path: str | Path, threshold: float = 0.0) -> EmotionLexicon:
    """Read a CSV with a word column and one numeric column per emotion.

    A flag is set when the column value exceeds ``threshold`` (0 for 0/1
    files; use a rating cut-off for graded lexicons).
    """
    acc: dict[str, set[str]] = {}
    with open(path, newline="", encoding="utf-8-sig") as fh:
        reader = csv.reader(fh)
        header = [h.strip().lower() for h in next(reader, [])]
        if not header:
            raise EmotionLexiconError(f"{path}: empty file")
        word_col = header.index("word") if "word" in header else 0
        emo_cols = {i: h for i, h in enumerate(header) if h in _INDEX}
        if not emo_cols:
            raise EmotionLexiconError(f"{path}: header has no emotion columns")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                word = row[word_col].strip()
                on = {h for i, h in emo_cols.items() if float(row[i]) > threshold}
            except (IndexError, ValueError):
                raise EmotionLexiconError(f"{path}:{lineno}: unparseable row {row!r}") from None
            if on:
                acc.setdefault(word.casefold(), set()).update(on)
    return EmotionLexicon.from_emotions(acc)


def merge_lexicons(nrc: EmotionLexicon, gold: EmotionLexicon) -> EmotionLexicon:
    """Union keyed by word; gold contributes only its five emotions; flags OR-ed."""
    mask = tuple(e in GOLD_EMOTIONS for e in EMOTIONS)
    merged = dict(nrc.entries)
    for word, flags in gold.entries.items():
        flags = tuple(f and m for f, m in zip(flags, mask))
        if word in merged:
            merged[word] = tuple(a or b for a, b in zip(merged[word], flags))
        elif any(flags):
            merged[word] = flags
    return EmotionLexicon(merged)


def _check_emotion(emotion: str) -> None:
    if emotion not in _INDEX:
        raise EmotionLexiconError(f"unknown emotion {emotion!r}; expected one of {EMOTIONS}")


def etf(emotion: str, doc: Sequence[str], lexicon: EmotionLexicon) -> int:
    _check_emotion(emotion)
    return sum(1 for tok in doc if lexicon.flagged(tok, emotion))


def idf(emotion: str, docs: Sequence[Sequence[str]], lexicon: EmotionLexicon) -> float:
    _check_emotion(emotion)
    if not docs:
        raise ValueError("idf needs at least one document")
    df = sum(1 for d in docs if any(lexicon.flagged(t, emotion) for t in d))
    return math.log(len(docs) / (1 + df))


@dataclass(frozen=True)
class EmotionVector:
    ticker: str
    date: dt.date
    values: Mapping[str, float]
    doc_count: int
    etf_sum: Mapping[str, int] = field(default_factory=dict)
    df: Mapping[str, int] = field(default_factory=dict)

    @property
    def no_signal(self) -> bool:
        return not any(self.etf_sum.get(e, 0) for e in EMOTIONS)

    def to_record(self) -> dict:
        rec = {"ticker": self.ticker, "date": self.date.isoformat()}
        rec.update({e: self.values[e] for e in EMOTIONS})
        rec["doc_count"] = self.doc_count
        return rec


def daily_emotion_vector(ticker: str, date: dt.date, docs: Sequence, lexicon: EmotionLexicon,
                         tokenize: Callable[[str], list[str]] | None = None) -> EmotionVector | None:
    """Emotion tf-idf for one (ticker, day); ``None`` when the day has no documents.

    ``docs`` are token lists, or documents with a ``text`` attribute when a
    ``tokenize`` callable is given.
    """
    if not docs:
        return None
    token_docs = [tokenize(d.text) if tokenize is not None else list(d) for d in docs]
    n = len(token_docs)
    values, sums, dfs = {}, {}, {}
    for emo in EMOTIONS:
        per_doc = [etf(emo, d, lexicon) for d in token_docs]
        dfs[emo] = sum(1 for c in per_doc if c)
        sums[emo] = sum(per_doc)
        values[emo] = sums[emo] * math.log(n / (1 + dfs[emo]))
    return EmotionVector(ticker, date, MappingProxyType(values), n, MappingProxyType(sums), MappingProxyType(dfs))


def write_vectors(vectors: Iterable[EmotionVector], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for v in vectors:
            fh.write(json.dumps(v.to_record()) + "\n")
