"""Map article keywords to tickers by trigram cosine and edit distance."""

from __future__ import annotations

import csv
import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

DEFAULT_COS_THRESHOLD = 0.6
DEFAULT_EDIT_THRESHOLD = 2


def trigrams(s: str) -> Counter:
    """Character trigram counts of the casefolded string (no padding).

    Strings shorter than three characters contribute themselves as a
    single gram so they still compare equal to themselves.
    """
    s = s.casefold()
    if len(s) < 3:
        return Counter([s])
    return Counter(s[i:i + 3] for i in range(len(s) - 2))


def cosine_sim(a: str, b: str) -> float:
    if not a or not b:
        raise ValueError("cosine_sim needs two non-empty strings")
    ta, tb = trigrams(a), trigrams(b)
    dot = sum(n * tb[g] for g, n in ta.items())
    if dot == 0:
        return 0.0
    norm = math.sqrt(sum(n * n for n in ta.values()) * sum(n * n for n in tb.values()))
    return min(1.0, dot / norm)


def edit_distance(a: str, b: str) -> int:
    """Levenshtein distance with unit costs, on casefolded strings."""
    a, b = a.casefold(), b.casefold()
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


@dataclass(frozen=True)
class TickerProfile:
    ticker: str
    aliases: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "aliases", tuple(self.aliases))
        if not self.aliases:
            raise ValueError(f"profile {self.ticker}: at least one alias is required")


def load_profiles(path: str | Path) -> list[TickerProfile]:
    """Read ``ticker,alias`` rows (one alias per row, optional header)."""
    by_ticker: dict[str, list[str]] = {}
    owner: dict[str, str] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or (lineno == 1 and [c.strip().lower() for c in row] == ["ticker", "alias"]):
                continue
            if len(row) != 2 or not row[0].strip() or not row[1].strip():
                raise ValueError(f"{path}:{lineno}: expected 'ticker,alias'")
            ticker, alias = row[0].strip(), row[1].strip()
            if owner.setdefault(alias, ticker) != ticker:
                raise ValueError(f"{path}:{lineno}: alias {alias!r} already belongs to {owner[alias]}")
            by_ticker.setdefault(ticker, []).append(alias)
    return [TickerProfile(t, tuple(a)) for t, a in by_ticker.items()]


@dataclass(frozen=True)
class Match:
    ticker: str
    keyword: str
    alias: str
    cosine: float
    edit: int


def best_match(keywords: Iterable[str], profiles: Sequence[TickerProfile],
               cos_threshold: float = DEFAULT_COS_THRESHOLD,
               edit_threshold: int = DEFAULT_EDIT_THRESHOLD) -> Match | None:
    if not profiles:
        raise ValueError("match_ticker needs at least one ticker profile")
    keywords = [k for k in keywords if k and k.strip()]
    exact = {a.casefold(): p.ticker for p in profiles for a in p.aliases}
    for kw in keywords:
        hit = exact.get(kw.strip().casefold())
        if hit is not None:
            return Match(hit, kw, kw.strip(), 1.0, 0)

    best: Match | None = None
    best_key = None
    for p in profiles:
        for kw in keywords:
            for alias in p.aliases:
                cos = cosine_sim(kw, alias)
                ed = edit_distance(kw, alias)
                if cos < cos_threshold and ed > edit_threshold:
                    continue
                key = (-cos, ed, p.ticker)
                if best_key is None or key < best_key:
                    best, best_key = Match(p.ticker, kw, alias, cos, ed), key
    return best


def match_ticker(keywords: Iterable[str], profiles: Sequence[TickerProfile],
                 cos_threshold: float = DEFAULT_COS_THRESHOLD,
                 edit_threshold: int = DEFAULT_EDIT_THRESHOLD) -> str | None:
    """Ticker whose closest alias qualifies on cosine OR edit distance, else ``None``.

    Ties go to the higher cosine, then the lower edit distance, then the
    alphabetically first ticker.
    """
    m = best_match(keywords, profiles, cos_threshold, edit_threshold)
    return None if m is None else m.ticker
