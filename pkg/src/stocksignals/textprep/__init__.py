"""Text normalisation for tweets, news and transcripts."""

from .lexical import rule_tag, suffix_lemma
from .pipeline import (
    MODES,
    SOURCES,
    DocumentError,
    Engagement,
    PrepConfig,
    TextDocument,
    emotion_tokens,
    minimal_tokens,
    porter_stem,
    pos_filter,
    preprocess,
)
from .spelling import SpellingCorrector, correct_spelling

__all__ = [
    "MODES", "SOURCES", "DocumentError", "Engagement", "PrepConfig", "SpellingCorrector",
    "TextDocument", "correct_spelling", "emotion_tokens", "minimal_tokens", "porter_stem",
    "pos_filter", "preprocess", "rule_tag", "suffix_lemma",
]
