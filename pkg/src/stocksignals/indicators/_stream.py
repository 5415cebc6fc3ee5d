"""Incremental (bar-by-bar) indicator state machines.

Each indicator class exposes ``update(bar) -> float | None`` where ``None``
marks the warmup region. The building blocks take plain floats and pass
``None`` through until their input becomes defined.
"""

from __future__ import annotations

import bisect
import math
from collections import deque

FLAT_ATOL = 1e-9


class SMA:
    def __init__(self, w: int):
        self.w = w
        self.buf: deque[float] = deque(maxlen=w)

    def __call__(self, x):
        if x is None:
            return None
        self.buf.append(x)
        if len(self.buf) < self.w:
            return None
        return math.fsum(self.buf) / self.w


class RollingSum(SMA):
    def __call__(self, x):
        m = super().__call__(x)
        return None if m is None else math.fsum(self.buf)


class _Smoothed:
    def __init__(self, w: int, alpha: float):
        self.w = w
        self.alpha = alpha
        self.seed: list[float] = []
        self.value: float | None = None

    def __call__(self, x):
        if x is None:
            return None
        if self.value is None:
            self.seed.append(x)
            if len(self.seed) < self.w:
                return None
            self.value = math.fsum(self.seed) / self.w
            self.seed = []
        else:
            self.value = self.value + self.alpha * (x - self.value)
        return self.value


class EMA(_Smoothed):
    def __init__(self, w: int):
        super().__init__(w, 2.0 / (w + 1))


class Wilder(_Smoothed):
    def __init__(self, w: int):
        super().__init__(w, 1.0 / w)


class Window:
    """Last ``w`` values; ``full`` once ``w`` values have arrived."""

    def __init__(self, w: int):
        self.w = w
        self.buf: deque[float] = deque(maxlen=w)

    def push(self, x) -> bool:
        self.buf.append(x)
        return len(self.buf) == self.w


class Lag:
    """Returns the value seen ``w`` calls earlier."""

    def __init__(self, w: int):
        self.buf: deque[float] = deque(maxlen=w + 1)

    def __call__(self, x):
        self.buf.append(x)
        return self.buf[0] if len(self.buf) == self.buf.maxlen else None


class Indicator:
    """Base class; subclasses implement ``update``."""

    def update(self, bar):  # pragma: no cover - abstract
        raise NotImplementedError


class _PrevClose(Indicator):
    def __init__(self):
        self.prev: float | None = None

    def _step(self, bar):
        pc, self.prev = self.prev, bar.close
        return pc


class Close(Indicator):
    """Applies a float->float block to the close price."""

    def __init__(self, block):
        self.block = block

    def update(self, bar):
        return self.block(bar.close)


class WMA:
    def __init__(self, w: int):
        self.win = Window(w)
        self.den = w * (w + 1) / 2.0

    def __call__(self, x):
        if not self.win.push(x):
            return None
        return sum((i + 1) * v for i, v in enumerate(self.win.buf)) / self.den


class MACD(Indicator):
    def __init__(self, fast: int, slow: int, signal: int | None = None, part: str = "macd"):
        self.fast, self.slow = EMA(fast), EMA(slow)
        self.signal = EMA(signal) if signal else None
        self.part = part

    def update(self, bar):
        f, s = self.fast(bar.close), self.slow(bar.close)
        m = None if f is None or s is None else f - s
        if self.part == "macd":
            return m
        sig = self.signal(m)
        if self.part == "signal" or sig is None:
            return sig
        return m - sig


class RSI(_PrevClose):
    def __init__(self, w: int):
        super().__init__()
        self.gain, self.loss = Wilder(w), Wilder(w)

    def update(self, bar):
        pc = self._step(bar)
        if pc is None:
            return None
        d = bar.close - pc
        g = self.gain(max(d, 0.0))
        lo = self.loss(max(-d, 0.0))
        if g is None:
            return None
        if lo == 0:
            return 100.0
        if g == 0:
            return 0.0
        return 100.0 - 100.0 / (1.0 + g / lo)


class Bollinger(Indicator):
    def __init__(self, w: int, k: float, part: str):
        self.win = Window(w)
        self.k = k
        self.part = part

    def update(self, bar):
        if not self.win.push(bar.close):
            return None
        n = self.win.w
        m = math.fsum(self.win.buf) / n
        if self.part == "middle":
            return m
        sd = math.sqrt(math.fsum((v - m) ** 2 for v in self.win.buf) / n)
        return m + self.k * sd if self.part == "upper" else m - self.k * sd


class StdDev(Indicator):
    def __init__(self, w: int):
        self.win = Window(w)

    def update(self, bar):
        if not self.win.push(bar.close):
            return None
        n = self.win.w
        m = math.fsum(self.win.buf) / n
        return math.sqrt(math.fsum((v - m) ** 2 for v in self.win.buf) / n)


class _HighLow(Indicator):
    def __init__(self, w: int):
        self.hi, self.lo = Window(w), Window(w)

    def _range(self, bar):
        full = self.hi.push(bar.high)
        self.lo.push(bar.low)
        if not full:
            return None
        return max(self.hi.buf), min(self.lo.buf)


class StochasticK(_HighLow):
    def update(self, bar):
        r = self._range(bar)
        if r is None:
            return None
        hh, ll = r
        if hh - ll <= FLAT_ATOL:
            return 50.0
        return 100.0 * (bar.close - ll) / (hh - ll)


class WilliamsR(_HighLow):
    def update(self, bar):
        r = self._range(bar)
        if r is None:
            return None
        hh, ll = r
        if hh - ll <= FLAT_ATOL:
            return -50.0
        return -100.0 * (hh - bar.close) / (hh - ll)


class Smoothed(Indicator):
    """Applies float blocks in sequence to another indicator's output."""

    def __init__(self, inner: Indicator, *blocks):
        self.inner = inner
        self.blocks = blocks

    def update(self, bar):
        v = self.inner.update(bar)
        for b in self.blocks:
            v = b(v)
        return v


class TrueRange(_PrevClose):
    def update(self, bar):
        pc = self._step(bar)
        if pc is None:
            return None
        return max(bar.high - bar.low, abs(bar.high - pc), abs(bar.low - pc))


class CCI(Indicator):
    def __init__(self, w: int):
        self.win = Window(w)

    def update(self, bar):
        tp = (bar.high + bar.low + bar.close) / 3.0
        if not self.win.push(tp):
            return None
        n = self.win.w
        m = math.fsum(self.win.buf) / n
        md = math.fsum(abs(v - m) for v in self.win.buf) / n
        if md == 0:
            return 0.0
        return (tp - m) / (0.015 * md)


class OBV(_PrevClose):
    def __init__(self):
        super().__init__()
        self.total = 0.0

    def update(self, bar):
        pc = self._step(bar)
        if pc is not None:
            if bar.close > pc:
                self.total += bar.volume
            elif bar.close < pc:
                self.total -= bar.volume
            else:
                self.total += 0.0
        return self.total


class RatioToMA(Indicator):
    """Disparity (``100*C/MA``) or bias (``100*(C-MA)/MA``)."""

    def __init__(self, w: int, kind: str):
        self.ma = SMA(w)
        self.kind = kind

    def update(self, bar):
        m = self.ma(bar.close)
        if m is None:
            return None
        if self.kind == "disparity":
            return 100.0 * bar.close / m
        return 100.0 * (bar.close - m) / m


class PriceOscillator(Indicator):
    def __init__(self, short: int, long: int):
        self.s, self.l = SMA(short), SMA(long)

    def update(self, bar):
        s, lo = self.s(bar.close), self.l(bar.close)
        if s is None or lo is None:
            return None
        return (s - lo) / s


class Change(Indicator):
    """``x - x[t-w]``, or ``scale*(x - x[t-w])/x[t-w]`` when ``scale`` is given."""

    def __init__(self, w: int, field: str = "close", scale: float | None = None):
        self.lag = Lag(w)
        self.field = field
        self.scale = scale

    def update(self, bar):
        x = float(getattr(bar, self.field))
        base = self.lag(x)
        if base is None:
            return None
        if self.scale is None:
            return x - base
        if base == 0:
            return None
        return self.scale * (x - base) / base


class MaxDrawdown(Indicator):
    def __init__(self, w: int):
        self.win = Window(w)

    def update(self, bar):
        if not self.win.push(bar.close):
            return None
        peak = -math.inf
        worst = 0.0
        for v in self.win.buf:
            peak = max(peak, v)
            worst = max(worst, (peak - v) / peak)
        return worst


class MedianPrice(Indicator):
    def update(self, bar):
        return (bar.high + bar.low) / 2.0


class Extreme(Indicator):
    def __init__(self, w: int, highest: bool):
        self.win = Window(w)
        self.highest = highest

    def update(self, bar):
        if not self.win.push(bar.close):
            return None
        return max(self.win.buf) if self.highest else min(self.win.buf)


class TSI(_PrevClose):
    def __init__(self, long: int, short: int):
        super().__init__()
        self.n1, self.n2 = EMA(long), EMA(short)
        self.d1, self.d2 = EMA(long), EMA(short)

    def update(self, bar):
        pc = self._step(bar)
        if pc is None:
            return None
        d = bar.close - pc
        num = self.n2(self.n1(d))
        den = self.d2(self.d1(abs(d)))
        if den is None:
            return None
        if den == 0:
            return 0.0
        return 100.0 * num / den


class UlcerIndex(Indicator):
    def __init__(self, w: int):
        self.win = Window(w)
        self.mean_sq = SMA(w)

    def update(self, bar):
        if not self.win.push(bar.close):
            return None
        hh = max(self.win.buf)
        pct = 100.0 * (bar.close - hh) / hh
        m = self.mean_sq(pct * pct)
        return None if m is None else math.sqrt(m)


class UltimateOscillator(_PrevClose):
    def __init__(self, short: int, medium: int, long: int):
        super().__init__()
        self.bp = [RollingSum(n) for n in (short, medium, long)]
        self.tr = [RollingSum(n) for n in (short, medium, long)]

    def update(self, bar):
        pc = self._step(bar)
        if pc is None:
            return None
        lo = min(bar.low, pc)
        bp = bar.close - lo
        trr = max(bar.high, pc) - lo
        avgs = []
        for b_sum, t_sum in zip(self.bp, self.tr):
            b, t = b_sum(bp), t_sum(trr)
            if t is None:
                avgs.append(None)
            else:
                avgs.append(0.5 if t == 0 else b / t)
        if None in avgs:
            return None
        return 100.0 * (4.0 * avgs[0] + 2.0 * avgs[1] + avgs[2]) / 7.0


class VolatilityRatio(Indicator):
    def __init__(self, short: int, long: int):
        self.tr = TrueRange()
        self.s, self.l = EMA(short), EMA(long)

    def update(self, bar):
        t = self.tr.update(bar)
        s, lo = self.s(t), self.l(t)
        if s is None or lo is None:
            return None
        return 1.0 if lo == 0 else s / lo


class Aroon(Indicator):
    def __init__(self, w: int, part: str):
        self.w = w
        self.hi, self.lo = Window(w + 1), Window(w + 1)
        self.part = part

    @staticmethod
    def _since(buf, better) -> int:
        vals = list(buf)
        best_i = len(vals) - 1
        for i in range(len(vals) - 2, -1, -1):
            if better(vals[i], vals[best_i]):
                best_i = i
        return len(vals) - 1 - best_i

    def update(self, bar):
        full = self.hi.push(bar.high)
        self.lo.push(bar.low)
        if not full:
            return None
        up = 100.0 * (self.w - self._since(self.hi.buf, lambda a, b: a > b)) / self.w
        down = 100.0 * (self.w - self._since(self.lo.buf, lambda a, b: a < b)) / self.w
        return {"up": up, "down": down, "osc": up - down}[self.part]


class AccumDist(Indicator):
    def __init__(self):
        self.total = 0.0

    def update(self, bar):
        rng = bar.high - bar.low
        clv = 0.0 if rng <= FLAT_ATOL else ((bar.close - bar.low) - (bar.high - bar.close)) / rng
        self.total += clv * bar.volume
        return self.total


class Chaikin(Indicator):
    def __init__(self, fast: int, slow: int):
        self.ad = AccumDist()
        self.f, self.s = EMA(fast), EMA(slow)

    def update(self, bar):
        a = self.ad.update(bar)
        f, s = self.f(a), self.s(a)
        return None if f is None or s is None else f - s


class Awesome(Indicator):
    def __init__(self, fast: int, slow: int, smooth: int | None = None):
        self.f, self.s = SMA(fast), SMA(slow)
        self.avg = SMA(smooth) if smooth else None

    def update(self, bar):
        mp = (bar.high + bar.low) / 2.0
        f, s = self.f(mp), self.s(mp)
        ao = None if f is None or s is None else f - s
        if self.avg is None:
            return ao
        m = self.avg(ao)
        return None if m is None else ao - m


class WinProbability(Indicator):
    def __init__(self, trades):
        pairs = sorted(trades, key=lambda t: t[0])
        self.dates = [d for d, _ in pairs]
        self.pnl = [p for _, p in pairs]
        self.k = 0
        self.wins = 0

    def update(self, bar):
        k = bisect.bisect_right(self.dates, bar.date)
        while self.k < k:
            self.wins += self.pnl[self.k] > 0
            self.k += 1
        return None if self.k == 0 else 100.0 * self.wins / self.k


class Breadth(Indicator):
    def __init__(self, w: int, table):
        self.table = table
        self.avg = SMA(w)

    def update(self, bar):
        adv, dec = self.table[bar.date]
        tot = adv + dec
        return self.avg(0.0 if tot == 0 else (adv - dec) / tot)
