"""Source clients: turn per-day API responses into ``TextDocument`` lists."""

from __future__ import annotations

import datetime as dt
import hashlib
import logging
import os
import time
from typing import Callable, Sequence

from ..keymatch import TickerProfile, match_ticker
from ..textprep.pipeline import Engagement, TextDocument
from .config import Identity, SourceConfig
from .scheduler import PoliteScheduler
from .transport import AuthError, FixtureTransport, IngestError, NetworkError, RateLimitError, Request, Response

log = logging.getLogger(__name__)

MAX_RETRIES = 5
BACKOFF_BASE = 1.0


def day_range(start: dt.date, end: dt.date) -> list[dt.date]:
    if end < start:
        raise ValueError(f"empty date range {start}..{end}")
    return [start + dt.timedelta(days=i) for i in range((end - start).days + 1)]


def build_request(cfg: SourceConfig, ticker: str, day: dt.date, identity: Identity) -> Request:
    url = cfg.endpoint + cfg.query.format(ticker=ticker, start=day.isoformat(), end=day.isoformat())
    headers = {"User-Agent": identity.user_agent}
    if cfg.auth_env:
        token = os.environ.get(cfg.auth_env)
        if token:
            headers["Authorization"] = f"Bearer {token}"
    return Request(url, headers, identity.proxy)


def _doc_id(source: str, ticker: str, day: dt.date, text: str) -> str:
    digest = hashlib.sha1(f"{source}|{ticker}|{day}|{text}".encode("utf-8")).hexdigest()
    return digest[:16]


def _parse_date(value, fallback: dt.date) -> dt.date:
    if not value:
        return fallback
    s = str(value)
    if len(s) >= 8 and s[:8].isdigit():  # 20220103T130000
        return dt.date(int(s[:4]), int(s[4:6]), int(s[6:8]))
    return dt.date.fromisoformat(s[:10])


def parse_response(cfg: SourceConfig, ticker: str, day: dt.date, payload,
                   profiles: Sequence[TickerProfile] | None = None) -> list[TextDocument]:
    """Normalise one response body.

    With ``profiles``, records carrying a ``keywords`` list are kept only if
    their keywords match ``ticker`` (see :func:`match_ticker`).
    """
    if cfg.format == "guardian":
        items = [{"id": r.get("id"), "date": r.get("webPublicationDate"),
                  "text": " ".join(filter(None, [r.get("webTitle"), (r.get("fields") or {}).get("trailText")]))}
                 for r in (payload.get("response") or {}).get("results", [])]
    elif cfg.format == "alphavantage":
        items = [{"id": r.get("url"), "date": r.get("time_published"),
                  "text": " ".join(filter(None, [r.get("title"), r.get("summary")]))}
                 for r in payload.get("feed", [])]
    else:
        items = payload.get("documents", [])
    docs = []
    for rec in items:
        text = str(rec.get("text") or "").strip()
        if not text:
            continue
        if profiles and rec.get("keywords"):
            if match_ticker(rec["keywords"], profiles) != ticker:
                log.debug("dropping %s: keywords %s do not match %s", rec.get("id"), rec["keywords"], ticker)
                continue
        date = _parse_date(rec.get("date"), day)
        eng = None
        if cfg.source == "twitter":
            eng = Engagement(int(rec.get("likes") or 0), int(rec.get("retweets") or 0), int(rec.get("replies") or 0))
        doc_id = str(rec.get("id") or _doc_id(cfg.source, ticker, date, text))
        docs.append(TextDocument(doc_id, date, ticker, cfg.source, text, eng))
    return docs


def request_with_retry(transport: Callable[[Request], Response], request: Request, *,
                       max_retries: int = MAX_RETRIES, backoff_base: float = BACKOFF_BASE,
                       sleep: Callable[[float], None] = time.sleep) -> Response:
    """Send one request. 429 and network failures back off ``base * 2**k``."""
    for attempt in range(max_retries + 1):
        try:
            resp = transport(request)
        except NetworkError as exc:
            if attempt == max_retries:
                raise
            log.warning("network failure on %s (%s); retry %d", request.url, exc, attempt + 1)
            sleep(backoff_base * 2 ** attempt)
            continue
        if resp.status in (401, 403):
            raise AuthError(f"{request.url}: HTTP {resp.status}; check the token environment variable")
        if resp.status == 429:
            if attempt == max_retries:
                raise RateLimitError(f"{request.url}: still rate limited after {max_retries} retries")
            log.warning("rate limited on %s; backing off (retry %d)", request.url, attempt + 1)
            sleep(backoff_base * 2 ** attempt)
            continue
        if resp.status >= 500:
            if attempt == max_retries:
                raise NetworkError(f"{request.url}: HTTP {resp.status}")
            sleep(backoff_base * 2 ** attempt)
            continue
        if resp.status >= 400:
            raise IngestError(f"{request.url}: HTTP {resp.status}")
        return resp
    raise AssertionError("unreachable")


def fetch(cfg: SourceConfig, ticker: str, date_range: tuple[dt.date, dt.date], *,
          transport: Callable[[Request], Response] | None = None,
          scheduler: PoliteScheduler | None = None, backoff_base: float = BACKOFF_BASE,
          sleep: Callable[[float], None] = time.sleep,
          profiles: Sequence[TickerProfile] | None = None) -> list[TextDocument]:
    """Fetch one document list per day in ``date_range`` (inclusive).

    Without a transport, live HTTP is used only if ``cfg.live`` is set;
    otherwise an error asks for fixture replay.
    """
    if transport is None:
        from .transport import UrllibTransport
        transport = UrllibTransport(enabled=cfg.live)
    days = day_range(*date_range)
    scheduler = scheduler or PoliteScheduler.for_source(cfg, sleep=sleep)

    def one(i: int, identity: Identity) -> list[TextDocument]:
        req = build_request(cfg, ticker, days[i], identity)
        resp = request_with_retry(transport, req, backoff_base=backoff_base, sleep=sleep)
        docs = parse_response(cfg, ticker, days[i], resp.json(), profiles)
        if not docs:
            log.info("sparse day: %s %s %s returned no documents", cfg.source, ticker, days[i])
        return docs

    out: list[TextDocument] = []
    for batch in scheduler.run(len(days), one):
        out.extend(batch)
    return out


def replay(cfg: SourceConfig, ticker: str, date_range, fixture_paths, **kw) -> list[TextDocument]:
    """Fetch from recorded responses with pacing disabled."""
    sched = PoliteScheduler(0.0, 0.0, cfg.identities, 1, name=cfg.source)
    return fetch(cfg, ticker, date_range, transport=FixtureTransport.load(*fixture_paths),
                 scheduler=sched, **kw)
