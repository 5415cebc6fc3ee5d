"""Sentiment word lists and their file loaders.

Lexicon files are not shipped. Supported layouts:

* Loughran-McDonald master dictionary CSV (``Word`` column plus one column
  per category; a positive year marks membership),
* Harvard-IV / General Inquirer CSV (``Entry``, ``Positiv``, ``Negativ``),
* a two-column fallback ``word,category``.
"""

from __future__ import annotations

import csv
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable

from ..textprep.pipeline import porter_stem

log = logging.getLogger(__name__)

CATEGORIES = ("positive", "negative", "uncertainty", "litigious", "strong_modal", "weak_modal", "constraining")
NAMES = ("loughran_mcdonald", "harvard_iv", "custom")

_LM_COLUMNS = {
    "positive": "Positive", "negative": "Negative", "uncertainty": "Uncertainty",
    "litigious": "Litigious", "strong_modal": "Strong_Modal", "weak_modal": "Weak_Modal",
    "constraining": "Constraining",
}


class LexiconError(ValueError):
    pass


def _stem_key(word: str) -> str:
    prev = word
    for _ in range(10):
        nxt = porter_stem(prev)
        if nxt == prev:
            break
        prev = nxt
    return prev


@dataclass(frozen=True)
class SentimentLexicon:
    """Category word sets.

    When ``stemmed`` is true, entries were reduced with the same Porter
    fixpoint used by the ``lm`` preprocessing mode, and lookups stem the
    query token too.
    """

    positive: frozenset
    negative: frozenset
    name: str = "custom"
    stemmed: bool = False
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.name not in NAMES:
            raise LexiconError(f"lexicon name must be one of {NAMES}")
        both = self.positive & self.negative
        if both:
            raise LexiconError(f"words in both positive and negative sets: {sorted(both)[:5]}")

    def key(self, token: str) -> str:
        k = token.casefold()
        return _stem_key(k) if self.stemmed else k

    def category(self, name: str) -> frozenset:
        if name == "positive":
            return self.positive
        if name == "negative":
            return self.negative
        return self.extra.get(name, frozenset())

    def swapped(self) -> "SentimentLexicon":
        return SentimentLexicon(self.negative, self.positive, self.name, self.stemmed, dict(self.extra))

    @classmethod
    def from_words(cls, positive: Iterable[str], negative: Iterable[str], *, name: str = "custom",
                   stem: bool = False, **extra: Iterable[str]) -> "SentimentLexicon":
        norm: Callable[[str], str] = (lambda w: _stem_key(w.casefold())) if stem else str.casefold
        pos = {norm(w) for w in positive}
        neg = {norm(w) for w in negative}
        clash = pos & neg
        if clash:
            # a stem shared by positive and negative surface forms counts as negative
            log.warning("%d stems map to both polarities; keeping them negative", len(clash))
            pos -= clash
        ext = {k: frozenset(norm(w) for w in v) for k, v in extra.items()}
        return cls(frozenset(pos), frozenset(neg), name, stem, ext)


def load_lexicon(path: str | Path, *, name: str | None = None, stem: bool = False) -> SentimentLexicon:
    """Load a lexicon, detecting the layout from the CSV header."""
    path = Path(path)
    with path.open(newline="", encoding="utf-8-sig") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise LexiconError(f"{path}: empty lexicon file") from None
        rows = list(reader)
    cols = {h.strip(): i for i, h in enumerate(header)}
    sets: dict[str, set[str]] = {c: set() for c in CATEGORIES}

    if "Word" in cols and "Positive" in cols and "Negative" in cols:
        kind = "loughran_mcdonald"
        for lineno, row in enumerate(rows, start=2):
            word = row[cols["Word"]].strip()
            for cat, col in _LM_COLUMNS.items():
                if col not in cols:
                    continue
                try:
                    flag = float(row[cols[col]] or 0)
                except (ValueError, IndexError):
                    raise LexiconError(f"{path}:{lineno}: bad value in column {col}") from None
                if flag > 0:
                    sets[cat].add(word)
    elif "Entry" in cols and ("Positiv" in cols or "Negativ" in cols):
        kind = "harvard_iv"
        for row in rows:
            word = re.sub(r"#\d+$", "", row[cols["Entry"]].strip())
            if "Positiv" in cols and row[cols["Positiv"]].strip():
                sets["positive"].add(word)
            if "Negativ" in cols and row[cols["Negativ"]].strip():
                sets["negative"].add(word)
        # General Inquirer tags some senses both ways; such words carry no polarity
        amb = sets["positive"] & sets["negative"]
        sets["positive"] -= amb
        sets["negative"] -= amb
    elif len(header) == 2:
        kind = "custom"
        # two-column fallback: the header row may itself be data
        has_header = [h.strip().lower() for h in header] == ["word", "category"]
        body = rows if has_header else [header, *rows]
        for lineno, row in enumerate(body, start=2 if has_header else 1):
            if len(row) != 2:
                raise LexiconError(f"{path}:{lineno}: expected 'word,category'")
            cat = row[1].strip().lower()
            if cat not in sets:
                raise LexiconError(f"{path}:{lineno}: unknown category {row[1]!r}")
            sets[cat].add(row[0].strip())
    else:
        raise LexiconError(
            f"{path}: unrecognised layout; expected Loughran-McDonald master CSV, "
            "General Inquirer CSV (Entry/Positiv/Negativ) or 'word,category'")

    extra = {c: sets[c] for c in CATEGORIES[2:] if sets[c]}
    return SentimentLexicon.from_words(sets["positive"], sets["negative"], name=name or kind, stem=stem, **extra)
