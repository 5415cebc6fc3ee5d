"""Polite request pacing: random gaps, identity rotation, a concurrency cap."""

from __future__ import annotations

import json
import logging
import random
import sqlite3
import threading
import time
from concurrent.futures import Future, ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence, TypeVar

from .config import Identity, SourceConfig

log = logging.getLogger(__name__)
T = TypeVar("T")

SLOT_POLL = 0.002


class StateStore:
    """Tiny sqlite-backed key/value file for rotation cursors and last-start times."""

    def __init__(self, path: str | Path):
        self.path = str(path)
        self._lock = threading.Lock()
        with self._connect() as db:
            db.execute("CREATE TABLE IF NOT EXISTS kv (k TEXT PRIMARY KEY, v TEXT NOT NULL)")

    def _connect(self):
        return sqlite3.connect(self.path)

    def get(self, key: str, default=None):
        with self._lock, self._connect() as db:
            row = db.execute("SELECT v FROM kv WHERE k = ?", (key,)).fetchone()
        return default if row is None else json.loads(row[0])

    def set(self, key: str, value) -> None:
        with self._lock, self._connect() as db:
            db.execute("INSERT OR REPLACE INTO kv (k, v) VALUES (?, ?)", (key, json.dumps(value)))


@dataclass(frozen=True)
class Dispatch:
    index: int
    identity: Identity
    started: float
    delay: float


class PoliteScheduler:
    """Runs a request plan against one source.

    Request starts are spaced by a delay drawn uniformly from
    ``[min_delay, max_delay]``; identities rotate round-robin; at most
    ``max_concurrency`` requests are in flight. A start waits for a free
    slot, so a slow server can stretch a gap beyond ``max_delay`` but never
    shrink it below ``min_delay``. Every wait goes through ``sleep``, so an
    injected clock/sleep pair can drive the scheduler in simulated time.
    """

    def __init__(self, min_delay: float, max_delay: float, identities: Sequence[Identity],
                 max_concurrency: int = 1, *, name: str = "source", rng: random.Random | None = None,
                 clock: Callable[[], float] = time.monotonic, sleep: Callable[[float], None] = time.sleep,
                 state: StateStore | None = None):
        if not 0 <= min_delay <= max_delay:
            raise ValueError(f"delay bounds must satisfy 0 <= min <= max, got [{min_delay}, {max_delay}]")
        if not identities:
            raise ValueError("identity pool is empty")
        if max_concurrency < 1:
            raise ValueError("max_concurrency must be at least 1")
        self.min_delay, self.max_delay = min_delay, max_delay
        self.identities = list(identities)
        self.max_concurrency = max_concurrency
        self.name = name
        self.rng = rng or random.Random(0)
        self.clock, self.sleep = clock, sleep
        self.state = state
        self.cursor = state.get(f"cursor:{name}", 0) if state else 0
        self.last_start: float | None = state.get(f"last:{name}") if state else None
        self.dispatches: list[Dispatch] = []
        self._slots = threading.BoundedSemaphore(max_concurrency)
        self._inflight = 0
        self.max_inflight = 0
        self._count_lock = threading.Lock()

    @classmethod
    def for_source(cls, cfg: SourceConfig, **kw) -> "PoliteScheduler":
        return cls(cfg.min_delay, cfg.max_delay, cfg.identities, cfg.max_concurrency,
                   name=cfg.source, **kw)

    def _next_identity(self) -> Identity:
        ident = self.identities[self.cursor % len(self.identities)]
        self.cursor = (self.cursor + 1) % len(self.identities)
        return ident

    def _wait_gap(self) -> float:
        delay = self.rng.uniform(self.min_delay, self.max_delay)
        if self.last_start is not None:
            left = self.last_start + delay - self.clock()
            # sleep in short slices so an oversleeping OS timer costs little
            while left > 0:
                self.sleep(min(left, 0.005) if left < 0.02 else left - 0.01)
                left = self.last_start + delay - self.clock()
        return delay

    def _acquire_slot(self) -> None:
        # poll through the injectable sleep so a simulated clock can drive the wait too
        while not self._slots.acquire(blocking=False):
            self.sleep(SLOT_POLL)

    def _run_one(self, fn: Callable[[int, Identity], T], d: Dispatch) -> T:
        try:
            return fn(d.index, d.identity)
        finally:
            with self._count_lock:
                self._inflight -= 1
            self._slots.release()

    def run(self, n_requests: int, fn: Callable[[int, Identity], T]) -> list[T]:
        """Call ``fn(i, identity)`` for each planned request; results in plan order.

        The whole plan is dispatched; the first error raised by ``fn`` is
        re-raised afterwards.
        """
        if n_requests <= 0:
            raise ValueError("request plan is empty")
        futures: list[Future] = []
        with ThreadPoolExecutor(max_workers=self.max_concurrency) as pool:
            for i in range(n_requests):
                self._acquire_slot()
                delay = self._wait_gap()
                start = self.clock()
                d = Dispatch(i, self._next_identity(), start, delay)
                self.last_start = start
                self.dispatches.append(d)
                with self._count_lock:
                    self._inflight += 1
                    self.max_inflight = max(self.max_inflight, self._inflight)
                futures.append(pool.submit(self._run_one, fn, d))
        if self.state is not None:
            self.state.set(f"cursor:{self.name}", self.cursor)
            self.state.set(f"last:{self.name}", self.last_start)
        return [f.result() for f in futures]
