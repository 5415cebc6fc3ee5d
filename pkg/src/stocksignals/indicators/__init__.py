"""Technical indicators over daily price series, batch and streaming.

Every formula is listed in :data:`CATALOG` (``entry.formula``). Warmup bars
are undefined (NaN in arrays, ``None`` in entries), never zero-filled.
"""

from .registry import (
    CATALOG,
    IndicatorSeries,
    IndicatorSpec,
    IndicatorTable,
    IndicatorUnavailableError,
    StreamOrderError,
    StreamState,
    UnknownIndicatorError,
    compute,
    compute_all,
    default_catalog,
    stream_update,
)

__all__ = [
    "CATALOG",
    "IndicatorSeries",
    "IndicatorSpec",
    "IndicatorTable",
    "IndicatorUnavailableError",
    "StreamOrderError",
    "StreamState",
    "UnknownIndicatorError",
    "compute",
    "compute_all",
    "default_catalog",
    "stream_update",
]
