"""Daily OHLCV price series: loading, validation and close-to-close returns.

Input layouts
-------------
CSV with header ``ticker,date,open,high,low,close,volume`` (ISO dates), or
JSONL with the same field names. Gaps between trading days are legal;
returns are always taken between consecutive available bars.
"""

from __future__ import annotations

import csv
import datetime as dt
import json
import math
import warnings
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

PRICE_FIELDS = ("ticker", "date", "open", "high", "low", "close", "volume")
PRICE_ATOL = 1e-9


class PriceDataError(ValueError):
    """Raised for malformed or inconsistent price rows."""


@dataclass(frozen=True)
class PriceBar:
    ticker: str
    date: dt.date
    open: float
    high: float
    low: float
    close: float
    volume: float

    def violations(self) -> list[str]:
        """Return the invariants this bar breaks (empty when valid)."""
        out = []
        for name in ("open", "high", "low", "close"):
            v = getattr(self, name)
            if not math.isfinite(v) or v <= 0:
                out.append(f"{name} > 0")
        if not math.isfinite(self.volume) or self.volume < 0:
            out.append("volume >= 0")
        if self.low > self.high + PRICE_ATOL:
            out.append("low <= high")
        if not (self.low - PRICE_ATOL <= self.open <= self.high + PRICE_ATOL):
            out.append("low <= open <= high")
        if not (self.low - PRICE_ATOL <= self.close <= self.high + PRICE_ATOL):
            out.append("low <= close <= high")
        return out

    def to_record(self) -> dict:
        return {
            "ticker": self.ticker,
            "date": self.date.isoformat(),
            "open": self.open,
            "high": self.high,
            "low": self.low,
            "close": self.close,
            "volume": self.volume,
        }


@dataclass(frozen=True)
class ReturnSeries:
    """Close-to-close relative returns, each dated at the later bar."""

    ticker: str
    dates: tuple[dt.date, ...]
    values: np.ndarray

    def __post_init__(self):
        self.values.setflags(write=False)

    @property
    def entries(self) -> list[tuple[dt.date, float]]:
        return list(zip(self.dates, self.values.tolist()))

    def as_dict(self) -> dict[dt.date, float]:
        return dict(self.entries)

    def __len__(self) -> int:
        return len(self.dates)


def _parse_number(raw, field: str, rowno: int) -> float:
    try:
        value = float(raw)
    except (TypeError, ValueError):
        raise PriceDataError(f"row {rowno}: field {field!r} is not numeric: {raw!r}") from None
    return value


def _volume(value: float) -> float | int:
    return int(value) if float(value).is_integer() else value


def _make_bar(rec: dict, rowno: int) -> PriceBar:
    missing = [f for f in PRICE_FIELDS if f not in rec or rec[f] in (None, "")]
    if missing:
        raise PriceDataError(f"row {rowno}: missing required field(s) {', '.join(missing)}")
    try:
        date = dt.date.fromisoformat(str(rec["date"]).strip())
    except ValueError:
        raise PriceDataError(f"row {rowno}: date {rec['date']!r} is not ISO-8601 (YYYY-MM-DD)") from None
    bar = PriceBar(
        ticker=str(rec["ticker"]).strip(),
        date=date,
        open=_parse_number(rec["open"], "open", rowno),
        high=_parse_number(rec["high"], "high", rowno),
        low=_parse_number(rec["low"], "low", rowno),
        close=_parse_number(rec["close"], "close", rowno),
        volume=_volume(_parse_number(rec["volume"], "volume", rowno)),
    )
    bad = bar.violations()
    if bad:
        raise PriceDataError(f"row {rowno}: invariant violated: {'; '.join(bad)}")
    return bar


def _iter_records(path: Path, fmt: str):
    if fmt == "csv":
        with path.open(newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None:
                return
            absent = [f for f in PRICE_FIELDS if f not in reader.fieldnames]
            if absent:
                raise PriceDataError(f"header is missing column(s): {', '.join(absent)}")
            # header is row 1
            for i, rec in enumerate(reader, start=2):
                yield i, rec
    elif fmt == "jsonl":
        with path.open(encoding="utf-8") as fh:
            for i, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    rec = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise PriceDataError(f"row {i}: invalid JSON ({exc.msg})") from None
                yield i, rec
    else:
        raise ValueError(f"unsupported price format {fmt!r}; use 'csv' or 'jsonl'")


def load_prices(path: str | Path, format: str | None = None) -> dict[str, list[PriceBar]]:
    """Load a price file into per-ticker bar lists sorted by date.

    ``format`` defaults to the file suffix. An empty file yields ``{}`` and a
    warning. Duplicate ``(ticker, date)`` pairs are an error.
    """
    path = Path(path)
    fmt = format or path.suffix.lstrip(".").lower()
    series: dict[str, list[PriceBar]] = defaultdict(list)
    seen: dict[tuple[str, dt.date], int] = {}
    for rowno, rec in _iter_records(path, fmt):
        bar = _make_bar(rec, rowno)
        key = (bar.ticker, bar.date)
        if key in seen:
            raise PriceDataError(
                f"row {rowno}: duplicate (ticker, date) {bar.ticker} {bar.date} (first seen at row {seen[key]})"
            )
        seen[key] = rowno
        series[bar.ticker].append(bar)
    if not series:
        warnings.warn(f"price file {path} contains no bars", stacklevel=2)
        return {}
    return {t: sorted(bars, key=lambda b: b.date) for t, bars in sorted(series.items())}


def write_prices(bars: Iterable[PriceBar], path: str | Path, format: str | None = None) -> None:
    path = Path(path)
    fmt = format or path.suffix.lstrip(".").lower()
    rows = [b.to_record() for b in bars]
    if fmt == "csv":
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.DictWriter(fh, fieldnames=PRICE_FIELDS, lineterminator="\n")
            writer.writeheader()
            for r in rows:
                writer.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in r.items()})
    elif fmt == "jsonl":
        with path.open("w", encoding="utf-8") as fh:
            for r in rows:
                fh.write(json.dumps(r) + "\n")
    else:
        raise ValueError(f"unsupported price format {fmt!r}; use 'csv' or 'jsonl'")


def check_series(bars: Sequence[PriceBar]) -> None:
    """Raise unless ``bars`` is one ticker with strictly increasing dates."""
    if not bars:
        return
    ticker = bars[0].ticker
    for prev, cur in zip(bars, bars[1:]):
        if cur.ticker != ticker:
            raise PriceDataError(f"mixed tickers in series: {ticker!r} and {cur.ticker!r}")
        if cur.date <= prev.date:
            raise PriceDataError(f"dates not strictly increasing at {cur.date} (after {prev.date})")


def compute_returns(bars: Sequence[PriceBar]) -> ReturnSeries:
    """Relative close-to-close change ``(c[t] - c[t-1]) / c[t-1]`` dated at ``t``."""
    if len(bars) < 2:
        raise PriceDataError(f"need at least 2 bars to compute returns, got {len(bars)}")
    check_series(bars)
    closes = np.array([b.close for b in bars], dtype=float)
    if np.any(closes <= 0) or not np.all(np.isfinite(closes)):
        raise PriceDataError("close prices must be positive and finite")
    values = (closes[1:] - closes[:-1]) / closes[:-1]
    return ReturnSeries(bars[0].ticker, tuple(b.date for b in bars[1:]), values)
