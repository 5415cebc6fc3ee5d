"""Loaders for the bundled word lists (and user-supplied replacements)."""

from __future__ import annotations

from functools import lru_cache
from importlib import resources
from pathlib import Path


def _data_path(name: str) -> Path:
    return Path(str(resources.files("stocksignals") / "data" / name))


def read_tsv_map(path: str | Path) -> dict[str, str]:
    """Read ``surface<TAB>replacement`` lines; keys are case-folded."""
    out: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            key, sep, value = line.partition("\t")
            if not sep:
                raise ValueError(f"{path}:{lineno}: expected 'surface<TAB>replacement'")
            out[key.strip().casefold()] = value.strip()
    return out


def read_word_set(path: str | Path) -> frozenset[str]:
    """One word per line (extra TSV columns ignored); case-folded."""
    with open(path, encoding="utf-8") as fh:
        return frozenset(
            line.split("\t")[0].strip().casefold()
            for line in fh
            if line.strip() and not line.startswith("#")
        )


def read_frequencies(path: str | Path) -> dict[str, int]:
    """``word<TAB>count`` lines; keys are case-folded, counts summed on collision."""
    freq: dict[str, int] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            word, sep, count = line.rstrip("\n").partition("\t")
            if not sep:
                raise ValueError(f"{path}:{lineno}: expected 'word<TAB>count'")
            key = word.strip().casefold()
            freq[key] = freq.get(key, 0) + int(count)
    return freq


@lru_cache(maxsize=None)
def default_stopwords() -> frozenset[str]:
    return read_word_set(_data_path("stopwords.txt"))


@lru_cache(maxsize=None)
def default_slang() -> dict[str, str]:
    return read_tsv_map(_data_path("slang.tsv"))


@lru_cache(maxsize=None)
def default_contractions() -> dict[str, str]:
    return read_tsv_map(_data_path("contractions.tsv"))


@lru_cache(maxsize=None)
def default_frequencies() -> dict[str, int]:
    return read_frequencies(_data_path("spelling_freq.tsv"))


@lru_cache(maxsize=None)
def default_negators() -> frozenset[str]:
    return read_word_set(_data_path("negators.txt"))
