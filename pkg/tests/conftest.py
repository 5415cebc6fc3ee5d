from __future__ import annotations

import datetime as dt
import shutil
from pathlib import Path

import numpy as np
import pytest

from stocksignals.marketdata import PriceBar

FIXTURES = Path(__file__).parent / "fixtures"
MINICORPUS = FIXTURES / "minicorpus"

_criteria: dict[str, list[str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(name): acceptance criterion covered by this test")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    name = report.user_properties and dict(report.user_properties).get("criterion")
    if name:
        _criteria.setdefault(name, []).append(report.outcome)


@pytest.hookimpl(tryfirst=True)
def pytest_runtest_setup(item):
    mark = item.get_closest_marker("criterion")
    if mark:
        item.user_properties.append(("criterion", mark.args[0]))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcomes in _criteria.items():
        if any(o == "failed" for o in outcomes):
            status = "FAIL"
        elif all(o == "skipped" for o in outcomes):
            status = "SKIP"
        else:
            skipped = outcomes.count("skipped")
            status = "PASS" + (f" ({skipped} of {len(outcomes)} checks skipped)" if skipped else "")
        terminalreporter.write_line(f"{status}  {name}")


def random_bars(rng: np.random.Generator, n: int, ticker: str = "TEST",
                start: dt.date = dt.date(2020, 1, 1), flat_every: int = 0) -> list[PriceBar]:
    """Valid OHLCV bars from a geometric random walk; optionally some flat bars."""
    bars = []
    close = 100.0
    d = start
    for i in range(n):
        prev = close
        close = max(1.0, close * float(np.exp(rng.normal(0, 0.02))))
        if flat_every and i % flat_every == 0:
            close = prev
            o = h = l = close
        else:
            o = prev * float(np.exp(rng.normal(0, 0.005)))
            h = max(o, close) * (1 + abs(float(rng.normal(0, 0.01))))
            l = min(o, close) * (1 - abs(float(rng.normal(0, 0.01))))
        bars.append(PriceBar(ticker, d, o, h, l, close, int(rng.integers(0, 5_000_000))))
        d += dt.timedelta(days=1)
    return bars


def bars_from_closes(closes, ticker: str = "TEST", start: dt.date = dt.date(2020, 1, 1)) -> list[PriceBar]:
    return [PriceBar(ticker, start + dt.timedelta(days=i), c, c, c, c, 1000) for i, c in enumerate(closes)]


@pytest.fixture
def minicorpus(tmp_path) -> Path:
    """A private copy of the bundled mini-corpus (outputs land inside it)."""
    dst = tmp_path / "minicorpus"
    shutil.copytree(MINICORPUS, dst)
    return dst
