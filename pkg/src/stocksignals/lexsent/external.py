"""Adapters for third-party sentiment scorers (VADER, fine-tuned transformers, ...).

Wire protocol, one JSON object per line in each direction::

    request  {"id": "...", "text": "..."}
    response {"id": "...", "polarity": 0.42, "label": "positive"}

The returned polarity is authoritative; the label is re-derived with
:func:`classify_compound` and the backend's own label kept as provenance.
"""

from __future__ import annotations

import json
import logging
import math
import os
import selectors
import socket
import subprocess
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence

from ..textprep.pipeline import TextDocument
from .scoring import SentimentScore, classify_compound

log = logging.getLogger(__name__)


class BackendError(RuntimeError):
    pass


class BackendUnavailableError(BackendError):
    """Timeouts, dead processes, refused connections. Safe to retry later."""

    retryable = True


class BackendDataError(BackendError):
    """The backend answered with something that is not a valid reply."""

    retryable = False

    def __init__(self, message: str, raw: str):
        super().__init__(message)
        self.raw = raw


def parse_reply(raw: str, expected_id: str) -> tuple[float, str | None]:
    try:
        msg = json.loads(raw)
    except json.JSONDecodeError:
        log.error("malformed scorer reply: %r", raw)
        raise BackendDataError("reply is not JSON", raw) from None
    if not isinstance(msg, dict) or "polarity" not in msg:
        log.error("malformed scorer reply: %r", raw)
        raise BackendDataError("reply lacks a 'polarity' field", raw)
    if str(msg.get("id")) != str(expected_id):
        log.error("scorer reply id mismatch: %r", raw)
        raise BackendDataError(f"reply id {msg.get('id')!r} does not match request {expected_id!r}", raw)
    try:
        polarity = float(msg["polarity"])
    except (TypeError, ValueError):
        polarity = math.nan
    if math.isnan(polarity) or not -1.0 <= polarity <= 1.0:
        log.error("scorer polarity out of range: %r", raw)
        raise BackendDataError(f"polarity {msg['polarity']!r} is not a number in [-1, 1]", raw)
    label = msg.get("label")
    return polarity, None if label is None else str(label)


class _LineBackend:
    name = "line"

    def __init__(self, timeout: float = 5.0, attempts: int = 3, backoff: float = 0.0):
        self.timeout = timeout
        self.attempts = attempts
        self.backoff = backoff
        self._lock = threading.Lock()

    # subclasses implement _open/_close/_send/_recv
    def _exchange(self, payload: str) -> str:
        self._send(payload)
        line = self._recv(self.timeout)
        if line is None:
            raise BackendUnavailableError(f"{self.name}: no reply within {self.timeout}s")
        return line

    def score(self, doc_id: str, text: str) -> tuple[float, str | None]:
        payload = json.dumps({"id": doc_id, "text": text}) + "\n"
        last: Exception | None = None
        with self._lock:
            for attempt in range(self.attempts):
                try:
                    self._open()
                    raw = self._exchange(payload)
                    return parse_reply(raw, doc_id)
                except (BackendUnavailableError, OSError) as exc:
                    last = exc
                    log.warning("%s attempt %d/%d failed: %s", self.name, attempt + 1, self.attempts, exc)
                    self._close()
                    if self.backoff:
                        time.sleep(self.backoff * 2 ** attempt)
        raise BackendUnavailableError(f"{self.name}: unavailable after {self.attempts} attempts ({last})")

    def close(self):
        with self._lock:
            self._close()


class PipeScorer(_LineBackend):
    """Long-lived child process speaking the line protocol on stdin/stdout."""

    def __init__(self, command: Sequence[str], **kw):
        super().__init__(**kw)
        self.command = list(command)
        self.name = f"pipe:{self.command[0]}"
        self.proc: subprocess.Popen | None = None
        self._buf = b""

    def _open(self):
        if self.proc is None or self.proc.poll() is not None:
            self.proc = subprocess.Popen(self.command, stdin=subprocess.PIPE, stdout=subprocess.PIPE,
                                         stderr=subprocess.DEVNULL)
            self._buf = b""

    def _close(self):
        if self.proc is not None:
            if self.proc.poll() is None:
                self.proc.kill()
            self.proc.wait()
            for stream in (self.proc.stdin, self.proc.stdout):
                if stream:
                    stream.close()
            self.proc = None

    def _send(self, payload: str):
        assert self.proc and self.proc.stdin
        try:
            self.proc.stdin.write(payload.encode("utf-8"))
            self.proc.stdin.flush()
        except BrokenPipeError as exc:
            raise BackendUnavailableError(f"{self.name}: process exited") from exc

    def _recv(self, timeout: float) -> str | None:
        assert self.proc and self.proc.stdout
        fd = self.proc.stdout.fileno()
        deadline = time.monotonic() + timeout
        with selectors.DefaultSelector() as sel:
            sel.register(fd, selectors.EVENT_READ)
            while b"\n" not in self._buf:
                left = deadline - time.monotonic()
                if left <= 0 or not sel.select(left):
                    return None
                chunk = os.read(fd, 65536)
                if not chunk:
                    raise BackendUnavailableError(f"{self.name}: process closed its output")
                self._buf += chunk
        line, _, self._buf = self._buf.partition(b"\n")
        return line.decode("utf-8", "replace")


class SocketScorer(_LineBackend):
    """Line protocol over a TCP (local) socket."""

    def __init__(self, host: str, port: int, **kw):
        super().__init__(**kw)
        self.address = (host, port)
        self.name = f"socket:{host}:{port}"
        self.sock: socket.socket | None = None
        self._buf = b""

    def _open(self):
        if self.sock is None:
            try:
                self.sock = socket.create_connection(self.address, timeout=self.timeout)
            except OSError as exc:
                raise BackendUnavailableError(f"{self.name}: {exc}") from exc
            self._buf = b""

    def _close(self):
        if self.sock is not None:
            self.sock.close()
            self.sock = None

    def _send(self, payload: str):
        assert self.sock
        self.sock.sendall(payload.encode("utf-8"))

    def _recv(self, timeout: float) -> str | None:
        assert self.sock
        self.sock.settimeout(timeout)
        while b"\n" not in self._buf:
            try:
                chunk = self.sock.recv(65536)
            except socket.timeout:
                return None
            if not chunk:
                raise BackendUnavailableError(f"{self.name}: connection closed")
            self._buf += chunk
        line, _, self._buf = self._buf.partition(b"\n")
        return line.decode("utf-8", "replace")


class CallableScorer:
    """In-process backend around ``fn(text) -> polarity``."""

    def __init__(self, fn: Callable[[str], float], name: str = "callable"):
        self.fn = fn
        self.name = name

    def score(self, doc_id: str, text: str) -> tuple[float, str | None]:
        raw = json.dumps({"id": doc_id, "polarity": self.fn(text)})
        return parse_reply(raw, doc_id)

    def close(self):
        pass


_BACKENDS: dict[str, object] = {}


def register_backend(name: str, backend) -> None:
    _BACKENDS[name] = backend


def get_backend(name: str):
    try:
        return _BACKENDS[name]
    except KeyError:
        raise KeyError(f"no scorer backend registered as {name!r}; known: {sorted(_BACKENDS)}") from None


def external_scorer(doc: TextDocument, backend) -> SentimentScore:
    """Score one document with a registered (or directly passed) backend."""
    be = get_backend(backend) if isinstance(backend, str) else backend
    polarity, reported = be.score(doc.id, doc.text)
    label = classify_compound(polarity)
    return SentimentScore(
        polarity=polarity, subjectivity=0.0, pos_count=0, neg_count=0,
        word_count=len(doc.text.split()), label=label,
        provenance={"backend": getattr(be, "name", str(backend)), "id": doc.id, "reported_label": reported},
    )


def score_many(docs: Iterable[TextDocument], backend, max_concurrency: int = 4) -> list[SentimentScore]:
    docs = list(docs)
    with ThreadPoolExecutor(max_workers=max(1, max_concurrency)) as pool:
        return list(pool.map(lambda d: external_scorer(d, backend), docs))
