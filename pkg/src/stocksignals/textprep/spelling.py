"""Frequency-ranked spelling correction by edit enumeration.

Candidates are generated by deletes, transposes, replaces and inserts. Known
words at distance 1 win over distance 2; within a distance the most frequent
word wins (ties alphabetical).
"""

from __future__ import annotations

from functools import lru_cache
from string import ascii_lowercase
from typing import Mapping

from .resources import default_frequencies


def edits1(word: str) -> set[str]:
    splits = [(word[:i], word[i:]) for i in range(len(word) + 1)]
    deletes = [a + b[1:] for a, b in splits if b]
    transposes = [a + b[1] + b[0] + b[2:] for a, b in splits if len(b) > 1]
    replaces = [a + c + b[1:] for a, b in splits if b for c in ascii_lowercase]
    inserts = [a + c + b for a, b in splits for c in ascii_lowercase]
    return set(deletes + transposes + replaces + inserts)


class SpellingCorrector:
    def __init__(self, frequencies: Mapping[str, int]):
        self.freq = {w.casefold(): c for w, c in frequencies.items()}
        self.correct = lru_cache(maxsize=65536)(self._correct)

    def _best(self, words) -> str | None:
        known = [w for w in words if w in self.freq]
        if not known:
            return None
        return min(known, key=lambda w: (-self.freq[w], w))

    def _correct(self, token: str) -> str:
        if not token.isalpha():
            return token
        word = token.casefold()
        if word in self.freq:
            return token
        e1 = edits1(word)
        best = self._best(e1)
        if best is None:
            best = self._best({e2 for e in e1 for e2 in edits1(e)})
        return token if best is None else best


@lru_cache(maxsize=None)
def default_corrector() -> SpellingCorrector:
    return SpellingCorrector(default_frequencies())


def correct_spelling(token: str, corrector: SpellingCorrector | None = None) -> str:
    """Return the best dictionary word within two edits, or ``token`` unchanged."""
    return (corrector or default_corrector()).correct(token)
