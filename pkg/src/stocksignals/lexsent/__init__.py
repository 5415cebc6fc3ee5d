"""Dictionary sentiment scoring and external scorer adapters."""

from .external import (
    BackendDataError,
    BackendUnavailableError,
    CallableScorer,
    PipeScorer,
    SocketScorer,
    external_scorer,
    get_backend,
    register_backend,
    score_many,
)
from .lexicon import LexiconError, SentimentLexicon, load_lexicon
from .scoring import (
    SentimentScore,
    classify_compound,
    discretize_regression_label,
    is_negator,
    score_counts,
    score_document,
)

__all__ = [
    "BackendDataError", "BackendUnavailableError", "CallableScorer", "LexiconError", "PipeScorer",
    "SentimentLexicon", "SentimentScore", "SocketScorer", "classify_compound",
    "discretize_regression_label", "external_scorer", "get_backend", "is_negator", "load_lexicon",
    "register_backend", "score_counts", "score_document", "score_many",
]
