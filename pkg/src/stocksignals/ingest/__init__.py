"""Source clients, polite scheduling, deduplicated corpus storage, benchmark prep."""

from .benchmark import (BenchmarkSourceError, LabelledText, largest_remainder, prepare_benchmark,
                        read_fiqa, read_phrasebank, stratified_split)
from .config import Identity, SourceConfig
from .fetch import build_request, day_range, fetch, parse_response, replay, request_with_retry
from .scheduler import Dispatch, PoliteScheduler, StateStore
from .store import CorpusStore, dedup_store, normalized_hash
from .transport import (AuthError, FixtureTransport, IngestError, LiveDisabledError, NetworkError,
                        RateLimitError, Request, Response, UrllibTransport)

__all__ = [
    "AuthError", "BenchmarkSourceError", "CorpusStore", "Dispatch", "FixtureTransport", "Identity",
    "IngestError", "LabelledText", "LiveDisabledError", "NetworkError", "PoliteScheduler",
    "RateLimitError", "Request", "Response", "SourceConfig", "StateStore", "UrllibTransport",
    "build_request", "day_range", "dedup_store", "fetch", "largest_remainder", "normalized_hash",
    "parse_response", "prepare_benchmark", "read_fiqa", "read_phrasebank", "replay",
    "request_with_retry", "stratified_split",
]
