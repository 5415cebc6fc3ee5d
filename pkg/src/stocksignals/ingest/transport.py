"""Request transports: recorded-response replay (default) and live HTTP."""

from __future__ import annotations

import json
import threading
import urllib.error
import urllib.request
from collections import defaultdict, deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping


class IngestError(RuntimeError):
    retryable = False


class AuthError(IngestError):
    """Credentials rejected (401/403). A configuration problem, never retried."""


class RateLimitError(IngestError):
    retryable = True


class NetworkError(IngestError):
    retryable = True


class LiveDisabledError(IngestError):
    pass


@dataclass(frozen=True)
class Request:
    url: str
    headers: Mapping[str, str] = field(default_factory=dict)
    proxy: str | None = None


@dataclass(frozen=True)
class Response:
    status: int
    body: str = ""
    headers: Mapping[str, str] = field(default_factory=dict)

    def json(self):
        return json.loads(self.body) if self.body else {}


class FixtureTransport:
    """Replays recorded responses keyed by URL, in recorded order.

    Fixture file: ``{"responses": [{"url", "status", "body", "headers"?}, ...]}``
    where ``body`` is a string or any JSON value. A URL with several
    recordings replays them one per call; the last one repeats.
    """

    def __init__(self, responses: Mapping[str, list[Response]] | None = None):
        self._queues: dict[str, deque] = defaultdict(deque)
        self._lock = threading.Lock()
        self.calls: list[Request] = []
        for url, rs in (responses or {}).items():
            self._queues[url].extend(rs)

    def add(self, url: str, response: Response) -> None:
        self._queues[url].append(response)

    @classmethod
    def load(cls, *paths: str | Path) -> "FixtureTransport":
        t = cls()
        for path in paths:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
            for rec in data["responses"]:
                body = rec.get("body", "")
                if not isinstance(body, str):
                    body = json.dumps(body)
                t.add(rec["url"], Response(int(rec["status"]), body, rec.get("headers", {})))
        return t

    def __call__(self, request: Request, timeout: float = 30.0) -> Response:
        with self._lock:
            self.calls.append(request)
            q = self._queues.get(request.url)
            if not q:
                raise NetworkError(f"no recorded response for {request.url}")
            return q.popleft() if len(q) > 1 else q[0]


class UrllibTransport:
    """Live HTTP via the standard library. Refuses to run unless enabled."""

    def __init__(self, enabled: bool = False):
        self.enabled = enabled

    def __call__(self, request: Request, timeout: float = 30.0) -> Response:
        if not self.enabled:
            raise LiveDisabledError("live fetching is disabled; enable it explicitly or use fixture replay")
        handlers = []
        if request.proxy:
            handlers.append(urllib.request.ProxyHandler({"http": request.proxy, "https": request.proxy}))
        opener = urllib.request.build_opener(*handlers)
        req = urllib.request.Request(request.url, headers=dict(request.headers))
        try:
            with opener.open(req, timeout=timeout) as resp:
                return Response(resp.status, resp.read().decode("utf-8", "replace"), dict(resp.headers))
        except urllib.error.HTTPError as exc:
            return Response(exc.code, exc.read().decode("utf-8", "replace"), dict(exc.headers or {}))
        except (urllib.error.URLError, TimeoutError, OSError) as exc:
            raise NetworkError(f"{request.url}: {exc}") from exc
