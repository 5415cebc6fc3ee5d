"""Staged text normalisation with Twitter- and dictionary-specific branches.

Stage order::

    punctuation/brackets -> unicode + URLs -> hashtags + stopwords
    -> [twitter] slang -> contractions -> spelling
    -> lemmatization -> [lm] stemming

Case is never folded in the output. ``@`` is dropped but the mention body
kept; ``#hashtag`` tokens are dropped whole.
"""

from __future__ import annotations

import datetime as dt
import re
import string
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Mapping, Sequence

from nltk.stem.porter import PorterStemmer

from . import resources
from .lexical import Lemmatizer, Tagger, rule_tag, suffix_lemma
from .spelling import SpellingCorrector, default_corrector

SOURCES = ("twitter", "news_archive", "radio_transcript", "news_api")
MODES = ("generic", "twitter", "lm")

_URL = re.compile(
    r"^(?:[a-z][a-z0-9+.-]*://\S+|www\.\S+|[\w-]+(?:\.[\w-]+)*\.(?:com|org|net|io|co|ly|gov|edu|info|biz|me|us|uk)(?:/\S*)?)$",
    re.IGNORECASE,
)
_PUNCT = set(string.punctuation) | set("“”‘’«»–—…")
_APOSTROPHES = str.maketrans({"’": "'", "‘": "'", "ʼ": "'"})
_FIXPOINT_LIMIT = 10


class DocumentError(ValueError):
    pass


@dataclass(frozen=True)
class Engagement:
    likes: int = 0
    retweets: int = 0
    replies: int = 0


@dataclass(frozen=True)
class TextDocument:
    id: str
    date: dt.date
    ticker: str
    source: str
    text: str
    engagement: Engagement | None = None

    def __post_init__(self):
        if self.source not in SOURCES:
            raise DocumentError(f"document {self.id}: source {self.source!r} not one of {SOURCES}")
        if self.engagement is not None and self.source != "twitter":
            raise DocumentError(f"document {self.id}: engagement metadata is only valid for twitter")

    def in_range(self, start: dt.date | None, end: dt.date | None) -> bool:
        return (start is None or self.date >= start) and (end is None or self.date <= end)

    def to_record(self) -> dict:
        rec = {"id": self.id, "date": self.date.isoformat(), "ticker": self.ticker,
               "source": self.source, "text": self.text}
        if self.engagement is not None:
            rec.update(likes=self.engagement.likes, retweets=self.engagement.retweets,
                       replies=self.engagement.replies)
        return rec

    @classmethod
    def from_record(cls, rec: Mapping) -> "TextDocument":
        eng = None
        if any(k in rec and rec[k] is not None for k in ("likes", "retweets", "replies")):
            eng = Engagement(int(rec.get("likes") or 0), int(rec.get("retweets") or 0), int(rec.get("replies") or 0))
        return cls(str(rec["id"]), dt.date.fromisoformat(str(rec["date"])), str(rec["ticker"]),
                   str(rec["source"]), str(rec["text"]), eng)


@lru_cache(maxsize=1)
def _porter() -> PorterStemmer:
    return PorterStemmer()


def porter_stem(token: str) -> str:
    """Porter stem without lowercasing (capitalised tokens mostly pass through)."""
    return _porter().stem(token, to_lowercase=False)


@dataclass(frozen=True)
class PrepConfig:
    mode: str = "generic"
    stopwords: frozenset = field(default_factory=resources.default_stopwords)
    slang_map: Mapping[str, str] = field(default_factory=resources.default_slang)
    contraction_map: Mapping[str, str] = field(default_factory=resources.default_contractions)
    lemmatizer: Lemmatizer | None = suffix_lemma
    stemmer: Callable[[str], str] | None = None
    speller: SpellingCorrector | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.mode == "lm" and self.stemmer is None:
            object.__setattr__(self, "stemmer", porter_stem)
        if self.mode == "twitter" and self.speller is None:
            object.__setattr__(self, "speller", default_corrector())

    @property
    def stemming(self) -> bool:
        return self.mode == "lm"

    @property
    def expand_contractions(self) -> bool:
        return self.mode == "twitter"

    @property
    def replace_slang(self) -> bool:
        return self.mode == "twitter"

    @property
    def correct_spelling(self) -> bool:
        return self.mode == "twitter"

    @classmethod
    def for_source(cls, source: str) -> "PrepConfig":
        return cls(mode="twitter" if source == "twitter" else "generic")


def is_url(token: str) -> bool:
    return bool(_URL.match(token))


def strip_punctuation(tokens: Sequence[str]) -> list[str]:
    """Split on punctuation and brackets.

    URL tokens and a leading ``#`` survive so later stages can recognise
    them; apostrophes inside words are kept (``won't``); ``@`` is dropped
    without splitting.
    """
    out: list[str] = []
    for tok in tokens:
        tok = tok.translate(_APOSTROPHES)
        if is_url(tok):
            out.append(tok)
            continue
        hashtag = tok.startswith("#")
        body = tok[1:] if hashtag else tok
        body = body.replace("@", "")
        chars = [" " if (c in _PUNCT and c != "'") else c for c in body]
        parts = "".join(chars).split()
        parts = [p.strip("'") for p in parts]
        parts = [re.sub(r"'{2,}", "'", p) for p in parts if p]
        if hashtag:
            # the whole hashtag phrase is one "hashtag word"
            if parts:
                out.append("#" + "".join(parts))
        else:
            out.extend(parts)
    return out


def strip_unicode_and_urls(tokens: Sequence[str]) -> list[str]:
    out = []
    for tok in tokens:
        if is_url(tok):
            continue
        tok = tok.encode("ascii", "ignore").decode("ascii")
        if tok and tok != "#":
            out.append(tok)
    return out


def drop_hashtags_and_stopwords(tokens: Sequence[str], stopwords) -> list[str]:
    return [t for t in tokens if not t.startswith("#") and t.casefold() not in stopwords]


def _expand(tokens: Sequence[str], mapping: Mapping[str, str]) -> list[str]:
    out: list[str] = []
    for tok in tokens:
        rep = mapping.get(tok.casefold())
        out.extend(rep.split() if rep is not None else [tok])
    return out


def _normalise(token: str, cfg: PrepConfig) -> str:
    """Lemmatize then stem to a fixpoint; refuse results that are stopwords."""
    cur = token
    for _ in range(_FIXPOINT_LIMIT):
        nxt = cur
        if cfg.lemmatizer is not None:
            cand = cfg.lemmatizer(nxt)
            if cand and cand.casefold() not in cfg.stopwords:
                nxt = cand
        if cfg.stemming and cfg.stemmer is not None:
            cand = cfg.stemmer(nxt)
            if cand and cand.casefold() not in cfg.stopwords:
                nxt = cand
        if nxt == cur:
            break
        cur = nxt
    return cur


def preprocess(doc: TextDocument | str, cfg: PrepConfig | None = None) -> list[str]:
    """Run the full pipeline and return the token list (possibly empty)."""
    cfg = cfg or PrepConfig()
    text = doc.text if isinstance(doc, TextDocument) else doc
    tokens = strip_punctuation(text.split())
    tokens = strip_unicode_and_urls(tokens)
    tokens = drop_hashtags_and_stopwords(tokens, cfg.stopwords)
    if cfg.replace_slang:
        tokens = _expand(tokens, cfg.slang_map)
    if cfg.expand_contractions:
        tokens = _expand(tokens, cfg.contraction_map)
    if cfg.correct_spelling and cfg.speller is not None:
        # capitalised tokens are treated as names and left alone
        tokens = [cfg.speller.correct(t) if t.isalpha() and t.islower() else t for t in tokens]
    return [_normalise(t, cfg) for t in tokens]


def minimal_tokens(text: str) -> list[str]:
    """Tokens after punctuation, unicode and URL removal only (input for tagging)."""
    return [t for t in strip_unicode_and_urls(strip_punctuation(text.split())) if not t.startswith("#")]


POS_KEEP = frozenset({"ADJ", "ADV", "INTJ"})
_PENN_KEEP = ("JJ", "RB", "UH")


def pos_filter(tagged: Sequence) -> list[str]:
    """Keep adjectives, adverbs and interjections from ``(token, tag)`` pairs."""
    out = []
    for item in tagged:
        if not (isinstance(item, tuple) and len(item) == 2):
            raise TypeError("pos_filter expects (token, tag) pairs; run a tagger (e.g. rule_tag) first")
        tok, tag = item
        tag = str(tag).upper()
        if tag in POS_KEEP or tag.startswith(_PENN_KEEP):
            out.append(tok)
    return out


def emotion_tokens(text: str, tagger: Tagger = rule_tag, cfg: PrepConfig | None = None) -> list[str]:
    """Tag minimally processed text, keep ADJ/ADV/INTJ, then lemmatize the survivors."""
    cfg = cfg or PrepConfig()
    kept = pos_filter(tagger(minimal_tokens(text)))
    kept = drop_hashtags_and_stopwords(kept, cfg.stopwords)
    return [_normalise(t, cfg) for t in kept]
