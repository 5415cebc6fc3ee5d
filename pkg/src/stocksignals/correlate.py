"""Daily signal aggregation and Spearman correlation against stock returns."""

from __future__ import annotations

import csv
import datetime as dt
import io
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .emotion import EMOTIONS, EmotionVector
from .lexsent.scoring import SentimentScore
from .marketdata import ReturnSeries
from .textprep.pipeline import Engagement, SOURCES

SENTIMENT_CHANNELS = tuple(f"{s}_sentiment" for s in SOURCES)
CHANNELS = SENTIMENT_CHANNELS + EMOTIONS
DISPLAY = {
    "twitter_sentiment": "Twitter-Sentiment",
    "news_archive_sentiment": "News-Archive-Sentiment",
    "radio_transcript_sentiment": "Radio-transcript-sentiment",
    "news_api_sentiment": "News-Articles(API)-sentiment",
}
LABEL_CODES = {"negative": -1.0, "neutral": 0.0, "positive": 1.0}
DEFAULT_PERMUTATIONS = 10_000
MIN_DAYS = 3


class UndefinedCorrelationError(ValueError):
    pass


def resolve_channel(name: str) -> str:
    """Accept ``news_archive`` as shorthand for ``news_archive_sentiment``."""
    if name in CHANNELS:
        return name
    if f"{name}_sentiment" in CHANNELS:
        return f"{name}_sentiment"
    raise ValueError(f"unknown channel {name!r}; expected one of {CHANNELS} (or a source name)")


@dataclass(frozen=True)
class ScoredDocument:
    ticker: str
    date: dt.date
    channel: str
    score: SentimentScore
    engagement: Engagement | None = None


@dataclass(frozen=True)
class DailySignal:
    ticker: str
    date: dt.date
    channel: str
    value: float
    doc_count: int

    def __post_init__(self):
        if self.channel not in CHANNELS:
            raise ValueError(f"unknown channel {self.channel!r}")
        if self.doc_count < 1:
            raise ValueError("an emitted daily signal needs doc_count >= 1")

    def to_record(self) -> dict:
        return {"ticker": self.ticker, "date": self.date.isoformat(), "channel": self.channel,
                "value": self.value, "doc_count": self.doc_count}

    @classmethod
    def from_record(cls, rec: Mapping) -> "DailySignal":
        return cls(str(rec["ticker"]), dt.date.fromisoformat(str(rec["date"])), str(rec["channel"]),
                   float(rec["value"]), int(rec["doc_count"]))


def aggregate_daily(scores: Sequence[ScoredDocument], *, weighted: bool = False,
                    mode: str = "polarity") -> DailySignal | None:
    """Mean document polarity for one (ticker, date, channel).

    No-signal documents are left out; if nothing remains no row is emitted.
    ``weighted`` uses ``1 + likes + retweets`` as the weight, and
    ``mode="label"`` averages label codes (-1, 0, 1) instead of polarities.
    """
    if mode not in ("polarity", "label"):
        raise ValueError("mode must be 'polarity' or 'label'")
    if not scores:
        return None
    keys = {(s.ticker, s.date, s.channel) for s in scores}
    if len(keys) != 1:
        raise ValueError(f"aggregate_daily expects one (ticker, date, channel), got {sorted(keys)[:3]}")
    ticker, date, channel = next(iter(keys))
    live = [s for s in scores if not s.score.no_signal]
    if not live:
        return None
    vals = [LABEL_CODES[s.score.label] if mode == "label" else s.score.polarity for s in live]
    if weighted:
        w = [1.0 + (s.engagement.likes + s.engagement.retweets if s.engagement else 0) for s in live]
        value = math.fsum(v * wi for v, wi in zip(vals, w)) / math.fsum(w)
    else:
        value = math.fsum(vals) / len(vals)
    return DailySignal(ticker, date, channel, value, len(live))


def emotion_signals(vector: EmotionVector) -> list[DailySignal]:
    """One row per emotion that actually occurred that day."""
    return [DailySignal(vector.ticker, vector.date, e, float(vector.values[e]), vector.doc_count)
            for e in EMOTIONS if vector.etf_sum.get(e, 0) > 0]


def average_ranks(x: Sequence[float]) -> np.ndarray:
    """1-based ranks with ties sharing the mean of their positions."""
    a = np.asarray(x, dtype=float)
    order = np.argsort(a, kind="mergesort")
    sorted_a = a[order]
    ranks = np.empty(len(a), dtype=float)
    # boundaries of runs of equal values
    starts = np.flatnonzero(np.r_[True, sorted_a[1:] != sorted_a[:-1]])
    ends = np.r_[starts[1:], len(a)]
    for s, e in zip(starts, ends):
        ranks[order[s:e]] = (s + e + 1) / 2.0
    return ranks


def _centered(r: np.ndarray) -> np.ndarray:
    c = r - r.mean()
    norm = math.sqrt(float(np.dot(c, c)))
    if norm == 0.0:
        raise UndefinedCorrelationError("correlation is undefined for a constant series")
    return c / norm


def spearman(x: Sequence[float], y: Sequence[float]) -> float:
    if len(x) != len(y):
        raise ValueError(f"length mismatch: {len(x)} vs {len(y)}")
    if len(x) < MIN_DAYS:
        raise ValueError(f"spearman needs at least {MIN_DAYS} pairs, got {len(x)}")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ValueError("spearman inputs must be finite")
    # centred average ranks are multiples of 1/2, so these sums are exact and
    # identical (or reversed) orderings give exactly +1 (-1)
    cx = average_ranks(x) - (len(x) + 1) / 2.0
    cy = average_ranks(y) - (len(y) + 1) / 2.0
    sxx, syy = float(np.dot(cx, cx)), float(np.dot(cy, cy))
    if sxx == 0.0 or syy == 0.0:
        raise UndefinedCorrelationError("correlation is undefined for a constant series")
    rho = float(np.dot(cx, cy)) / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, rho))


def permutation_pvalue(x: Sequence[float], y: Sequence[float], n: int = DEFAULT_PERMUTATIONS,
                       seed: int = 0) -> float:
    """Two-sided p-value ``(1 + #{|rho*| >= |rho|}) / (1 + n)`` over shuffles of ``y``."""
    cx = _centered(average_ranks(x))
    cy = _centered(average_ranks(y))
    observed = abs(float(np.dot(cx, cy)))
    rng = np.random.default_rng(seed)
    hits = 0
    chunk = max(1, min(n, 2_000_000 // max(1, len(cy))))
    done = 0
    while done < n:
        k = min(chunk, n - done)
        perms = rng.permuted(np.broadcast_to(cy, (k, len(cy))), axis=1)
        hits += int(np.count_nonzero(np.abs(perms @ cx) >= observed - 1e-12))
        done += k
    return (1 + hits) / (1 + n)


@dataclass(frozen=True)
class CorrelationRow:
    ticker: str
    channel: str
    rho: float | None
    n_days: int
    p_value: float | None = None

    @property
    def sparse(self) -> bool:
        return self.rho is None


def _fmt(v: float | None) -> str:
    return "" if v is None else repr(float(v))


@dataclass(frozen=True)
class CorrelationReport:
    rows: tuple[CorrelationRow, ...]

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(sorted(self.rows, key=lambda r: (r.ticker, r.channel))))

    def get(self, ticker: str, channel: str) -> CorrelationRow | None:
        for r in self.rows:
            if r.ticker == ticker and r.channel == channel:
                return r
        return None

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["ticker", "channel", "rho", "n_days", "p_value"])
        for r in self.rows:
            w.writerow([r.ticker, r.channel, _fmt(r.rho), r.n_days, _fmt(r.p_value)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "CorrelationReport":
        rows = []
        for rec in csv.DictReader(io.StringIO(text)):
            rows.append(CorrelationRow(rec["ticker"], rec["channel"],
                                       float(rec["rho"]) if rec["rho"] else None, int(rec["n_days"]),
                                       float(rec["p_value"]) if rec["p_value"] else None))
        return cls(tuple(rows))

    def to_text(self) -> str:
        """Two plain-text tables: sentiment categories, then emotions."""
        out = []
        for title, head, chans in (("Spearman correlation of stock return with sentiment per data category",
                                    "Category", SENTIMENT_CHANNELS),
                                   ("Spearman correlation of stock return with emotions",
                                    "Emotion", EMOTIONS)):
            rows = [r for r in self.rows if r.channel in chans]
            if not rows:
                continue
            names = [DISPLAY.get(r.channel, r.channel) for r in rows]
            w1 = max(6, *(len(r.ticker) for r in rows))
            w2 = max(len(head), *(len(n) for n in names))
            out.append(title)
            out.append(f"{'Ticker':<{w1}}  {head:<{w2}}  {'Spearman Corr':>13}  {'Days':>5}  {'p-value':>8}")
            out.append("-" * (w1 + w2 + 38))
            for r, name in zip(rows, names):
                rho = "sparse" if r.rho is None else f"{r.rho:.3f}"
                p = "" if r.p_value is None else f"{r.p_value:.4f}"
                out.append(f"{r.ticker:<{w1}}  {name:<{w2}}  {rho:>13}  {r.n_days:>5}  {p:>8}")
            out.append("")
        return "\n".join(out)


def join_on_dates(returns: ReturnSeries, signals: Iterable[DailySignal], lag: int = 0
                  ) -> tuple[list[dt.date], list[float], list[float]]:
    """Pair each signal at day t with the return ``lag`` trading days later."""
    index = {d: i for i, d in enumerate(returns.dates)}
    dates, xs, ys = [], [], []
    for s in sorted(signals, key=lambda s: s.date):
        i = index.get(s.date)
        if i is None or not 0 <= i + lag < len(returns.dates):
            continue
        r = float(returns.values[i + lag])
        if not math.isfinite(r):
            continue
        dates.append(s.date)
        xs.append(s.value)
        ys.append(r)
    return dates, xs, ys


def correlate_returns(returns: ReturnSeries | Mapping[str, ReturnSeries], signals: Iterable[DailySignal], *,
                      lag: int = 0, permutations: int | None = None, seed: int = 0) -> CorrelationReport:
    """One row per (ticker, channel) present in ``signals``.

    Fewer than three joined days, or a constant side, gives ``rho=None``.
    """
    if isinstance(returns, ReturnSeries):
        returns = {returns.ticker: returns}
    groups: dict[tuple[str, str], list[DailySignal]] = {}
    for s in signals:
        groups.setdefault((s.ticker, s.channel), []).append(s)
    rows = []
    for (ticker, channel), sigs in sorted(groups.items()):
        series = returns.get(ticker)
        if series is None:
            rows.append(CorrelationRow(ticker, channel, None, 0))
            continue
        _, xs, ys = join_on_dates(series, sigs, lag)
        rho = p = None
        if len(xs) >= MIN_DAYS:
            try:
                rho = spearman(xs, ys)
                if permutations:
                    p = permutation_pvalue(xs, ys, permutations, seed)
            except UndefinedCorrelationError:
                rho = None
        rows.append(CorrelationRow(ticker, channel, rho, len(xs), p))
    return CorrelationReport(tuple(rows))
