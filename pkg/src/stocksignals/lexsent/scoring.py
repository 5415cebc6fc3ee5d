"""Dictionary polarity with negation, and label threshold mappings."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from ..textprep.resources import default_negators
from .lexicon import SentimentLexicon

LABELS = ("negative", "neutral", "positive")
COMPOUND_THRESHOLD = 0.05
REGRESSION_THRESHOLD = 0.15


@dataclass(frozen=True)
class SentimentScore:
    polarity: float
    subjectivity: float
    pos_count: int
    neg_count: int
    word_count: int
    label: str
    no_signal: bool = False
    provenance: dict = field(default_factory=dict, compare=False)

    @property
    def subjectivity_conventional(self) -> float:
        """``(pos + neg) / count``: share of tokens carrying any polarity."""
        if self.word_count == 0:
            return 0.0
        return (self.pos_count + self.neg_count) / self.word_count


def is_negator(token: str, negators=None) -> bool:
    t = token.casefold()
    return t in (negators or default_negators()) or t.endswith("n't")


def polarity_label(polarity: float) -> str:
    if polarity > 0:
        return "positive"
    if polarity < 0:
        return "negative"
    return "neutral"


def score_counts(pos: int, neg: int, count: int) -> SentimentScore:
    """Polarity ``(pos-neg)/(pos+neg)`` and subjectivity ``(pos-neg)/count``."""
    if pos + neg == 0:
        return SentimentScore(0.0, 0.0, pos, neg, count, "neutral", no_signal=True)
    polarity = (pos - neg) / (pos + neg)
    subjectivity = (pos - neg) / count if count else 0.0
    return SentimentScore(polarity, subjectivity, pos, neg, count, polarity_label(polarity))


def score_document(tokens: Sequence[str], lexicon: SentimentLexicon, negation_window: int = 3,
                   negators=None) -> SentimentScore:
    """Count lexicon hits and score them.

    A positive word with a negator among the ``negation_window`` tokens
    before it is counted as negative. Negated negatives stay negative.
    """
    negators = negators if negators is not None else default_negators()
    pos = neg = 0
    for i, tok in enumerate(tokens):
        key = lexicon.key(tok)
        if key in lexicon.positive:
            lo = max(0, i - negation_window)
            if any(is_negator(t, negators) for t in tokens[lo:i]):
                neg += 1
            else:
                pos += 1
        elif key in lexicon.negative:
            neg += 1
    return score_counts(pos, neg, len(tokens))


def _check_unit(value: float, what: str) -> float:
    value = float(value)
    if math.isnan(value) or not -1.0 <= value <= 1.0:
        raise ValueError(f"{what} must lie in [-1, 1], got {value!r}")
    return value


def classify_compound(compound: float) -> str:
    """>= 0.05 positive, <= -0.05 negative, otherwise neutral."""
    c = _check_unit(compound, "compound score")
    if c >= COMPOUND_THRESHOLD:
        return "positive"
    if c <= -COMPOUND_THRESHOLD:
        return "negative"
    return "neutral"


def discretize_regression_label(score: float) -> str:
    """>= 0.15 positive, <= -0.15 negative, otherwise neutral."""
    s = _check_unit(score, "sentiment score")
    if s >= REGRESSION_THRESHOLD:
        return "positive"
    if s <= -REGRESSION_THRESHOLD:
        return "negative"
    return "neutral"
