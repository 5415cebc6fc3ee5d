"""Vectorised (whole-series) indicator formulas.

Every function returns a float array aligned with the input bars; NaN marks
the warmup region. Helpers accept series with a leading NaN prefix so that
indicators can be chained (EMA of MACD, SMA of %K, ...).
"""

from __future__ import annotations

import math

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

FLAT_ATOL = 1e-9


def first_valid(x: np.ndarray) -> int | None:
    idx = np.flatnonzero(~np.isnan(x))
    return int(idx[0]) if idx.size else None


def _nan(n: int) -> np.ndarray:
    return np.full(n, np.nan)


def _windows(x: np.ndarray, w: int):
    """Return (start, windows) over the valid tail, or (None, None) if too short."""
    s = first_valid(x)
    if s is None or len(x) - s < w:
        return None, None
    return s, sliding_window_view(x[s:], w)


def sma(x: np.ndarray, w: int) -> np.ndarray:
    out = _nan(len(x))
    s, win = _windows(x, w)
    if win is not None:
        out[s + w - 1:] = win.mean(axis=1)
    return out


def rolling_sum(x: np.ndarray, w: int) -> np.ndarray:
    out = _nan(len(x))
    s, win = _windows(x, w)
    if win is not None:
        out[s + w - 1:] = win.sum(axis=1)
    return out


def rolling_max(x: np.ndarray, w: int) -> np.ndarray:
    out = _nan(len(x))
    s, win = _windows(x, w)
    if win is not None:
        out[s + w - 1:] = win.max(axis=1)
    return out


def rolling_min(x: np.ndarray, w: int) -> np.ndarray:
    out = _nan(len(x))
    s, win = _windows(x, w)
    if win is not None:
        out[s + w - 1:] = win.min(axis=1)
    return out


def rolling_std(x: np.ndarray, w: int) -> np.ndarray:
    """Population standard deviation over ``w`` bars."""
    out = _nan(len(x))
    s, win = _windows(x, w)
    if win is not None:
        out[s + w - 1:] = win.std(axis=1)
    return out


def _smoothed(x: np.ndarray, w: int, alpha: float) -> np.ndarray:
    out = _nan(len(x))
    s = first_valid(x)
    if s is None or len(x) - s < w:
        return out
    vals = x.tolist()
    e = math.fsum(vals[s:s + w]) / w
    out[s + w - 1] = e
    for i in range(s + w, len(x)):
        e = e + alpha * (vals[i] - e)
        out[i] = e
    return out


def ema(x: np.ndarray, w: int) -> np.ndarray:
    """EMA seeded with the SMA of the first ``w`` valid values, multiplier 2/(w+1)."""
    return _smoothed(x, w, 2.0 / (w + 1))


def wilder(x: np.ndarray, w: int) -> np.ndarray:
    """Wilder smoothing (multiplier 1/w), seeded like :func:`ema`."""
    return _smoothed(x, w, 1.0 / w)


def wma(x: np.ndarray, w: int) -> np.ndarray:
    out = _nan(len(x))
    s, win = _windows(x, w)
    if win is not None:
        weights = np.arange(1, w + 1, dtype=float)
        out[s + w - 1:] = win @ weights / weights.sum()
    return out


def lagged(x: np.ndarray, w: int) -> np.ndarray:
    """``x[t - w]`` aligned at ``t``."""
    out = _nan(len(x))
    if w < len(x):
        out[w:] = x[:-w]
    return out


def prev_close(close: np.ndarray) -> np.ndarray:
    return lagged(close, 1)


def true_range(high, low, close) -> np.ndarray:
    pc = prev_close(close)
    return np.maximum(np.maximum(high - low, np.abs(high - pc)), np.abs(low - pc))


def rsi(close: np.ndarray, w: int) -> np.ndarray:
    d = close - prev_close(close)
    gain = np.where(np.isnan(d), np.nan, np.maximum(d, 0.0))
    loss = np.where(np.isnan(d), np.nan, np.maximum(-d, 0.0))
    g = wilder(gain, w)
    lo = wilder(loss, w)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = 100.0 - 100.0 / (1.0 + g / lo)
    val = np.where(lo == 0, 100.0, np.where(g == 0, 0.0, val))
    return np.where(np.isnan(g), np.nan, val)


def stochastic_k(high, low, close, w: int) -> np.ndarray:
    hh = rolling_max(high, w)
    ll = rolling_min(low, w)
    rng = hh - ll
    with np.errstate(divide="ignore", invalid="ignore"):
        k = 100.0 * (close - ll) / rng
    return np.where(rng <= FLAT_ATOL, 50.0, k)


def williams_r(high, low, close, w: int) -> np.ndarray:
    hh = rolling_max(high, w)
    ll = rolling_min(low, w)
    rng = hh - ll
    with np.errstate(divide="ignore", invalid="ignore"):
        r = -100.0 * (hh - close) / rng
    return np.where(rng <= FLAT_ATOL, -50.0, r)


def cci(high, low, close, w: int) -> np.ndarray:
    tp = (high + low + close) / 3.0
    out = _nan(len(tp))
    s, win = _windows(tp, w)
    if win is None:
        return out
    m = win.mean(axis=1)
    md = np.abs(win - m[:, None]).mean(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = (tp[s + w - 1:] - m) / (0.015 * md)
    out[s + w - 1:] = np.where(md == 0, 0.0, val)
    return out


def max_drawdown(close: np.ndarray, w: int) -> np.ndarray:
    """Largest peak-to-trough fractional decline inside each trailing window."""
    out = _nan(len(close))
    s, win = _windows(close, w)
    if win is None:
        return out
    peak = np.maximum.accumulate(win, axis=1)
    out[s + w - 1:] = ((peak - win) / peak).max(axis=1)
    return out


def ulcer_index(close: np.ndarray, w: int) -> np.ndarray:
    hh = rolling_max(close, w)
    pct = 100.0 * (close - hh) / hh
    return np.sqrt(sma(pct * pct, w))


def ultimate_oscillator(high, low, close, short: int, medium: int, long: int) -> np.ndarray:
    pc = prev_close(close)
    lo = np.minimum(low, pc)
    bp = close - lo
    trr = np.maximum(high, pc) - lo
    parts = []
    for n in (short, medium, long):
        b = rolling_sum(bp, n)
        t = rolling_sum(trr, n)
        with np.errstate(divide="ignore", invalid="ignore"):
            parts.append(np.where(t == 0, 0.5, b / t))
    return 100.0 * (4.0 * parts[0] + 2.0 * parts[1] + parts[2]) / 7.0


def tsi(close: np.ndarray, long: int, short: int) -> np.ndarray:
    d = close - prev_close(close)
    num = ema(ema(d, long), short)
    den = ema(ema(np.abs(d), long), short)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = 100.0 * num / den
    return np.where(den == 0, 0.0, val)


def aroon(series: np.ndarray, w: int, use_max: bool) -> np.ndarray:
    """100 * (w - bars since the most recent extreme) / w over the last w+1 bars."""
    out = _nan(len(series))
    s, win = _windows(series, w + 1)
    if win is None:
        return out
    rev = win[:, ::-1]
    since = rev.argmax(axis=1) if use_max else rev.argmin(axis=1)
    out[s + w:] = 100.0 * (w - since) / w
    return out


def accumulation_distribution(high, low, close, volume) -> np.ndarray:
    rng = high - low
    with np.errstate(divide="ignore", invalid="ignore"):
        clv = ((close - low) - (high - close)) / rng
    clv = np.where(rng <= FLAT_ATOL, 0.0, clv)
    return np.cumsum(clv * volume)


def obv(close: np.ndarray, volume: np.ndarray) -> np.ndarray:
    step = np.zeros(len(close))
    if len(close) > 1:
        step[1:] = np.sign(close[1:] - close[:-1]) * volume[1:]
    return np.cumsum(step)


def change(x: np.ndarray, w: int) -> np.ndarray:
    return x - lagged(x, w)


def pct_change(x: np.ndarray, w: int, scale: float = 100.0) -> np.ndarray:
    base = lagged(x, w)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = scale * (x - base) / base
    return np.where(base == 0, np.nan, val)


def win_probability(bar_dates: np.ndarray, trade_dates: np.ndarray, pnl: np.ndarray) -> np.ndarray:
    """Percentage of winning trades among trades dated on or before each bar."""
    order = np.argsort(trade_dates, kind="stable")
    td = trade_dates[order]
    wins = np.cumsum(pnl[order] > 0)
    k = np.searchsorted(td, bar_dates, side="right")
    out = _nan(len(bar_dates))
    has = k > 0
    out[has] = 100.0 * wins[k[has] - 1] / k[has]
    return out


def breadth(adv: np.ndarray, dec: np.ndarray, w: int) -> np.ndarray:
    tot = adv + dec
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(tot == 0, 0.0, (adv - dec) / tot)
    return sma(ratio, w)
