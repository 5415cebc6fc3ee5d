"""Indicator catalog, specs, batch/streaming entry points and table output."""

from __future__ import annotations

import csv
import datetime as dt
import io
import json
import math
import warnings
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Any, Callable, Iterable, Mapping, Sequence

import numpy as np

from ..marketdata import PriceBar, check_series
from . import _batch as B
from . import _stream as S


class UnknownIndicatorError(KeyError):
    def __str__(self):
        return self.args[0]


class IndicatorUnavailableError(ValueError):
    """The indicator needs an input (trade log, market breadth) that was not supplied."""


class StreamOrderError(ValueError):
    pass


@dataclass
class Frame:
    """Column arrays for one series plus a memo shared by every spec in a table."""

    dates: np.ndarray
    open: np.ndarray
    high: np.ndarray
    low: np.ndarray
    close: np.ndarray
    volume: np.ndarray
    trades: Sequence[tuple[dt.date, float]] | None = None
    breadth: Mapping[dt.date, tuple[float, float]] | None = None
    memo: dict = field(default_factory=dict)

    @classmethod
    def from_bars(cls, bars: Sequence[PriceBar], **extra) -> "Frame":
        col = lambda name: np.array([getattr(b, name) for b in bars], dtype=float)  # noqa: E731
        return cls(
            dates=np.array([b.date for b in bars], dtype="datetime64[D]"),
            open=col("open"), high=col("high"), low=col("low"),
            close=col("close"), volume=col("volume"), **extra,
        )

    def cached(self, key, fn: Callable[[], np.ndarray]) -> np.ndarray:
        if key not in self.memo:
            self.memo[key] = fn()
        return self.memo[key]

    # shared intermediates
    def sma(self, w):
        return self.cached(("sma", w), lambda: B.sma(self.close, w))

    def ema(self, w):
        return self.cached(("ema", w), lambda: B.ema(self.close, w))

    def tr(self):
        return self.cached(("tr",), lambda: B.true_range(self.high, self.low, self.close))

    def stoch_k(self, w):
        return self.cached(("stoch_k", w), lambda: B.stochastic_k(self.high, self.low, self.close, w))

    def macd(self, fast, slow):
        return self.cached(("macd", fast, slow), lambda: self.ema(fast) - self.ema(slow))

    def ad(self):
        return self.cached(("ad",), lambda: B.accumulation_distribution(self.high, self.low, self.close, self.volume))

    def ao(self, fast, slow):
        def build():
            mp = (self.high + self.low) / 2.0
            return B.sma(mp, fast) - B.sma(mp, slow)
        return self.cached(("ao", fast, slow), build)

    def aroon(self, w, up):
        src = self.high if up else self.low
        return self.cached(("aroon", w, up), lambda: B.aroon(src, w, use_max=up))


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    label: str
    formula: str
    defaults: Mapping[str, float]
    batch: Callable[..., np.ndarray]
    stream: Callable[..., S.Indicator]
    requires: str | None = None
    real_params: frozenset = frozenset()


CATALOG: dict[str, CatalogEntry] = {}


def _register(name, label, formula, defaults, batch, stream, requires=None, real=()):
    CATALOG[name] = CatalogEntry(name, label, formula, MappingProxyType(dict(defaults)), batch, stream,
                                 requires, frozenset(real))


def _registry():
    r = _register
    r("ma", "Moving Average", "mean(C[t-w+1..t])", {"window": 10},
      lambda f, window: f.sma(window), lambda window: S.Close(S.SMA(window)))
    r("ema", "Exponential Moving Average", "seed SMA(w); e += 2/(w+1)*(C-e)", {"window": 10},
      lambda f, window: f.ema(window), lambda window: S.Close(S.EMA(window)))
    r("wma", "Weighted Moving Average", "sum(i*C[t-w+i])/sum(i), i=1..w", {"window": 10},
      lambda f, window: B.wma(f.close, window), lambda window: S.Close(S.WMA(window)))
    r("macd", "MA Convergence Divergence", "EMA(fast) - EMA(slow)", {"fast": 12, "slow": 26},
      lambda f, fast, slow: f.macd(fast, slow), lambda fast, slow: S.MACD(fast, slow))
    r("macd_signal", "Signal line", "EMA(signal) of MACD", {"fast": 12, "slow": 26, "signal": 9},
      lambda f, fast, slow, signal: f.cached(("sl", fast, slow, signal), lambda: B.ema(f.macd(fast, slow), signal)),
      lambda fast, slow, signal: S.MACD(fast, slow, signal, "signal"))
    r("macd_hist", "MACD histogram", "MACD - signal", {"fast": 12, "slow": 26, "signal": 9},
      lambda f, fast, slow, signal: f.macd(fast, slow) - B.ema(f.macd(fast, slow), signal),
      lambda fast, slow, signal: S.MACD(fast, slow, signal, "hist"))
    r("rsi", "Relative Strength Index", "100 - 100/(1 + Wilder(gain)/Wilder(loss))", {"window": 14},
      lambda f, window: B.rsi(f.close, window), lambda window: S.RSI(window))
    for part, sign in (("upper", 1.0), ("middle", 0.0), ("lower", -1.0)):
        r(f"bb_{part}", f"Bollinger Band ({part})", "SMA(w) + k*Std(w)" if sign else "SMA(w)",
          {"window": 20, "k": 2.0} if sign else {"window": 20},
          (lambda f, window, k=2.0, _s=sign: f.sma(window) + _s * k * B.rolling_std(f.close, window)) if sign
          else (lambda f, window: f.sma(window)),
          (lambda window, k=2.0, _p=part: S.Bollinger(window, k, _p)),
          real=("k",))
    r("stoch_k", "Stochastic %K", "100*(C-L_w)/(H_w-L_w); 50 on a flat window", {"window": 14},
      lambda f, window: f.stoch_k(window), lambda window: S.StochasticK(window))
    r("stoch_d", "Stochastic %D", "SMA(smooth) of %K", {"window": 14, "smooth": 3},
      lambda f, window, smooth: B.sma(f.stoch_k(window), smooth),
      lambda window, smooth: S.Smoothed(S.StochasticK(window), S.SMA(smooth)))
    r("slow_d", "Slow stochastic", "SMA(smooth) of %D", {"window": 14, "smooth": 3},
      lambda f, window, smooth: B.sma(B.sma(f.stoch_k(window), smooth), smooth),
      lambda window, smooth: S.Smoothed(S.StochasticK(window), S.SMA(smooth), S.SMA(smooth)))
    r("williams_r", "Williams %R", "-100*(H_w-C)/(H_w-L_w); -50 on a flat window", {"window": 14},
      lambda f, window: B.williams_r(f.high, f.low, f.close, window), lambda window: S.WilliamsR(window))
    r("roc", "Rate of Change", "100*(C-C[t-w])/C[t-w]", {"window": 10},
      lambda f, window: B.pct_change(f.close, window), lambda window: S.Change(window, scale=100.0))
    r("mome", "Momentum", "C - C[t-w]", {"window": 10},
      lambda f, window: B.change(f.close, window), lambda window: S.Change(window))
    r("tr", "True Range", "max(H-L, |H-C[t-1]|, |L-C[t-1]|)", {},
      lambda f: f.tr(), lambda: S.TrueRange())
    r("atr", "Average True Range", "Wilder(w) of TR", {"window": 14},
      lambda f, window: B.wilder(f.tr(), window), lambda window: S.Smoothed(S.TrueRange(), S.Wilder(window)))
    r("cci", "Commodity Channel Index", "(TP-SMA(TP))/(0.015*meandev), TP=(H+L+C)/3", {"window": 20},
      lambda f, window: B.cci(f.high, f.low, f.close, window), lambda window: S.CCI(window))
    r("obv", "On Balance Volume", "cumulative sign(C-C[t-1])*V, OBV[0]=0", {},
      lambda f: f.cached(("obv",), lambda: B.obv(f.close, f.volume)), lambda: S.OBV())
    r("obv_ema", "EMA of On Balance Volume", "EMA(w) of OBV", {"window": 10},
      lambda f, window: B.ema(f.cached(("obv",), lambda: B.obv(f.close, f.volume)), window),
      lambda window: S.Smoothed(S.OBV(), S.EMA(window)))
    r("disparity", "Disparity", "100*C/MA(w)", {"window": 10},
      lambda f, window: 100.0 * f.close / f.sma(window), lambda window: S.RatioToMA(window, "disparity"))
    r("bias", "Bias / deviation rate", "100*(C-MA(w))/MA(w)", {"window": 10},
      lambda f, window: 100.0 * (f.close - f.sma(window)) / f.sma(window), lambda window: S.RatioToMA(window, "bias"))
    r("oscp", "Price oscillator", "(MA(short)-MA(long))/MA(short)", {"short": 5, "long": 10},
      lambda f, short, long: (f.sma(short) - f.sma(long)) / f.sma(short),
      lambda short, long: S.PriceOscillator(short, long))
    r("rdp", "Relative difference in percentage", "100*(C-C[t-w])/C[t-w]", {"window": 5},
      lambda f, window: B.pct_change(f.close, window), lambda window: S.Change(window, scale=100.0))
    r("mdd", "Maximum drawdown", "max peak-to-trough fractional decline in last w closes", {"window": 20},
      lambda f, window: B.max_drawdown(f.close, window), lambda window: S.MaxDrawdown(window))
    r("median_price", "Median price", "(H+L)/2", {},
      lambda f: (f.high + f.low) / 2.0, lambda: S.MedianPrice())
    r("highest", "Highest close", "max(C[t-w+1..t])", {"window": 10},
      lambda f, window: B.rolling_max(f.close, window), lambda window: S.Extreme(window, True))
    r("lowest", "Lowest close", "min(C[t-w+1..t])", {"window": 10},
      lambda f, window: B.rolling_min(f.close, window), lambda window: S.Extreme(window, False))
    r("std", "Standard deviation", "population std of last w closes", {"window": 20},
      lambda f, window: B.rolling_std(f.close, window), lambda window: S.StdDev(window))
    r("tsi", "True Strength Index", "100*EMA(EMA(dC,long),short)/EMA(EMA(|dC|,long),short)", {"long": 25, "short": 13},
      lambda f, long, short: B.tsi(f.close, long, short), lambda long, short: S.TSI(long, short))
    r("ui", "Ulcer Index", "sqrt(mean over w of (100*(C-max_w C)/max_w C)^2)", {"window": 14},
      lambda f, window: B.ulcer_index(f.close, window), lambda window: S.UlcerIndex(window))
    r("uo", "Ultimate Oscillator", "100*(4*A7+2*A14+A28)/7, A_n=sum BP/sum TR", {"short": 7, "medium": 14, "long": 28},
      lambda f, short, medium, long: B.ultimate_oscillator(f.high, f.low, f.close, short, medium, long),
      lambda short, medium, long: S.UltimateOscillator(short, medium, long))
    r("vroc", "Volume rate of change", "100*(V-V[t-w])/V[t-w]", {"window": 10},
      lambda f, window: B.pct_change(f.volume, window), lambda window: S.Change(window, "volume", 100.0))
    r("vr", "Volatility ratio", "EMA(short) of TR / EMA(long) of TR", {"short": 5, "long": 14},
      lambda f, short, long: _vr(f, short, long), lambda short, long: S.VolatilityRatio(short, long))
    r("pc", "Price change", "C - C[t-w]", {"window": 1},
      lambda f, window: B.change(f.close, window), lambda window: S.Change(window))
    r("ppc", "Percentage price change", "100*(C-C[t-w])/C[t-w]", {"window": 1},
      lambda f, window: B.pct_change(f.close, window), lambda window: S.Change(window, scale=100.0))
    r("ror", "Rate of return", "(C-C[t-w])/C[t-w]", {"window": 20},
      lambda f, window: B.pct_change(f.close, window, scale=1.0), lambda window: S.Change(window, scale=1.0))
    r("aroon_up", "Aroon up", "100*(w - bars since highest high of last w+1)/w", {"window": 25},
      lambda f, window: f.aroon(window, True), lambda window: S.Aroon(window, "up"))
    r("aroon_down", "Aroon down", "100*(w - bars since lowest low of last w+1)/w", {"window": 25},
      lambda f, window: f.aroon(window, False), lambda window: S.Aroon(window, "down"))
    r("aroon_osc", "Aroon oscillator", "Aroon up - Aroon down", {"window": 25},
      lambda f, window: f.aroon(window, True) - f.aroon(window, False), lambda window: S.Aroon(window, "osc"))
    r("acd", "Accumulation/Distribution line", "cumulative CLV*V, CLV=((C-L)-(H-C))/(H-L)", {},
      lambda f: f.ad(), lambda: S.AccumDist())
    r("cho", "Chaikin oscillator", "EMA(fast) of A/D - EMA(slow) of A/D", {"fast": 3, "slow": 10},
      lambda f, fast, slow: B.ema(f.ad(), fast) - B.ema(f.ad(), slow), lambda fast, slow: S.Chaikin(fast, slow))
    r("ao", "Awesome oscillator", "SMA(fast) - SMA(slow) of median price", {"fast": 5, "slow": 34},
      lambda f, fast, slow: f.ao(fast, slow), lambda fast, slow: S.Awesome(fast, slow))
    r("ac", "Acceleration", "AO - SMA(smooth) of AO", {"fast": 5, "slow": 34, "smooth": 5},
      lambda f, fast, slow, smooth: f.ao(fast, slow) - B.sma(f.ao(fast, slow), smooth),
      lambda fast, slow, smooth: S.Awesome(fast, slow, smooth))
    r("pp", "Probability of winning", "100*winning trades/total trades closed so far", {},
      lambda f: _pp(f), lambda trades: S.WinProbability(trades), requires="trades")
    r("br", "Breadth indicator", "SMA(w) of (adv-dec)/(adv+dec)", {"window": 1},
      lambda f, window: _br(f, window), lambda window, breadth: S.Breadth(window, breadth), requires="breadth")


def _vr(f: Frame, short: int, long: int) -> np.ndarray:
    s = B.ema(f.tr(), short)
    lo = B.ema(f.tr(), long)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(lo == 0, 1.0, s / lo)


def _pp(f: Frame) -> np.ndarray:
    trades = list(f.trades or [])
    if not trades:
        return np.full(len(f.close), np.nan)
    td = np.array([d for d, _ in trades], dtype="datetime64[D]")
    pnl = np.array([p for _, p in trades], dtype=float)
    return B.win_probability(f.dates, td, pnl)


def _br(f: Frame, window: int) -> np.ndarray:
    days = f.dates.astype(object)
    adv = np.array([f.breadth[d][0] for d in days], dtype=float)
    dec = np.array([f.breadth[d][1] for d in days], dtype=float)
    return B.breadth(adv, dec, window)


_registry()


def _fmt_param(v) -> str:
    if isinstance(v, float) and v.is_integer():
        return repr(v)
    return str(v)


class IndicatorSpec:
    """A catalog name plus parameters (defaults filled in, validated).

    >>> IndicatorSpec("ma", window=2).identifier
    'ma(window=2)'
    """

    __slots__ = ("name", "params")

    def __init__(self, name: str, params: Mapping[str, Any] | None = None, **kw):
        if name not in CATALOG:
            raise UnknownIndicatorError(
                f"unknown indicator {name!r}; supported: {', '.join(sorted(CATALOG))}")
        entry = CATALOG[name]
        given = {**(params or {}), **kw}
        extra = sorted(set(given) - set(entry.defaults))
        if extra:
            raise ValueError(f"{name}: unknown parameter(s) {', '.join(extra)}; expected {sorted(entry.defaults)}")
        merged = {**entry.defaults, **given}
        for k, v in merged.items():
            if k in entry.real_params:
                merged[k] = float(v)
                continue
            if float(v) != int(float(v)):
                raise ValueError(f"{name}: parameter {k} must be an integer, got {v!r}")
            merged[k] = int(float(v))
            if merged[k] < 1:
                raise ValueError(f"{name}: parameter {k} must be >= 1, got {v!r}")
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "params", MappingProxyType(dict(sorted(merged.items()))))

    def __setattr__(self, key, value):
        raise AttributeError("IndicatorSpec is immutable")

    @classmethod
    def parse(cls, text: str) -> "IndicatorSpec":
        """Parse ``NAME`` or ``NAME:k=v[,k=v]``."""
        name, _, rest = text.strip().partition(":")
        params = {}
        for item in filter(None, (p.strip() for p in rest.split(","))):
            k, sep, v = item.partition("=")
            if not sep:
                raise ValueError(f"bad parameter {item!r} in spec {text!r}; expected k=v")
            params[k.strip()] = float(v)
        return cls(name.strip().lower(), params)

    @property
    def entry(self) -> CatalogEntry:
        return CATALOG[self.name]

    @property
    def identifier(self) -> str:
        if not self.params:
            return self.name
        inner = ",".join(f"{k}={_fmt_param(v)}" for k, v in self.params.items())
        return f"{self.name}({inner})"

    def __eq__(self, other):
        return isinstance(other, IndicatorSpec) and (self.name, dict(self.params)) == (other.name, dict(other.params))

    def __hash__(self):
        return hash((self.name, tuple(self.params.items())))

    def __repr__(self):
        return f"IndicatorSpec({self.identifier!r})"


@dataclass(frozen=True)
class IndicatorSeries:
    spec: IndicatorSpec
    dates: tuple[dt.date, ...]
    values: np.ndarray  # NaN where undefined

    @property
    def entries(self) -> list[tuple[dt.date, float | None]]:
        return [(d, None if math.isnan(v) else v) for d, v in zip(self.dates, self.values.tolist())]


def _extras(spec: IndicatorSpec, trades, breadth, dates) -> dict:
    need = spec.entry.requires
    if need == "trades" and trades is None:
        raise IndicatorUnavailableError(f"{spec.identifier} needs a trade log (date, pnl) and none was supplied")
    if need == "breadth":
        if breadth is None:
            raise IndicatorUnavailableError(
                f"{spec.identifier} needs a market-breadth input (advancers/decliners per date); unsupported without it")
        missing = [d for d in dates if d not in breadth]
        if missing:
            raise IndicatorUnavailableError(f"{spec.identifier}: breadth input has no row for {missing[0]}")
    return {}


def _window_too_long(spec: IndicatorSpec, n: int) -> bool:
    return any(isinstance(v, int) and v > n for v in spec.params.values())


def _compute_frame(spec: IndicatorSpec, frame: Frame, dates: tuple) -> IndicatorSeries:
    _extras(spec, frame.trades, frame.breadth, dates)
    n = len(dates)
    if _window_too_long(spec, n):
        warnings.warn(f"{spec.identifier}: window longer than series ({n} bars); all values undefined", stacklevel=3)
        values = np.full(n, np.nan)
    elif n == 0:
        values = np.empty(0)
    else:
        values = np.asarray(spec.entry.batch(frame, **spec.params), dtype=float)
    values = values.copy()
    values.setflags(write=False)
    return IndicatorSeries(spec, dates, values)


def compute(spec: IndicatorSpec | str, bars: Sequence[PriceBar], *, trades=None, breadth=None) -> IndicatorSeries:
    """Batch-compute one indicator over a sorted single-ticker series."""
    if isinstance(spec, str):
        spec = IndicatorSpec.parse(spec)
    check_series(bars)
    frame = Frame.from_bars(bars, trades=trades, breadth=breadth)
    return _compute_frame(spec, frame, tuple(b.date for b in bars))


@dataclass
class IndicatorTable:
    dates: tuple[dt.date, ...]
    columns: dict[str, IndicatorSeries]
    errors: dict[str, Exception] = field(default_factory=dict)

    def __len__(self):
        return len(self.columns)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        names = list(self.columns)
        w.writerow(["date", *names])
        cols = [self.columns[n].values.tolist() for n in names]
        for i, d in enumerate(self.dates):
            w.writerow([d.isoformat(), *("" if math.isnan(c[i]) else repr(c[i]) for c in cols)])
        return buf.getvalue()

    def to_jsonl(self) -> str:
        names = list(self.columns)
        cols = [self.columns[n].values.tolist() for n in names]
        lines = []
        for i, d in enumerate(self.dates):
            row = {"date": d.isoformat()}
            row.update({n: (None if math.isnan(c[i]) else c[i]) for n, c in zip(names, cols)})
            lines.append(json.dumps(row))
        return "".join(line + "\n" for line in lines)


def compute_all(specs: Iterable[IndicatorSpec | str], bars: Sequence[PriceBar], *, trades=None, breadth=None) -> IndicatorTable:
    """Compute many indicators over one series, sharing intermediates.

    A failing spec is recorded in ``table.errors`` and does not stop the others.
    """
    check_series(bars)
    dates = tuple(b.date for b in bars)
    frame = Frame.from_bars(bars, trades=trades, breadth=breadth)
    table = IndicatorTable(dates, {})
    for s in specs:
        try:
            spec = IndicatorSpec.parse(s) if isinstance(s, str) else s
            table.columns[spec.identifier] = _compute_frame(spec, frame, dates)
        except (UnknownIndicatorError, IndicatorUnavailableError, ValueError) as exc:
            table.errors[s if isinstance(s, str) else s.identifier] = exc
    return table


class StreamState:
    """Rolling state for one spec; feed bars in date order via :func:`stream_update`."""

    def __init__(self, spec: IndicatorSpec | str, *, trades=None, breadth=None):
        if isinstance(spec, str):
            spec = IndicatorSpec.parse(spec)
        self.spec = spec
        _extras(spec, trades, breadth, ())
        kwargs = dict(spec.params)
        if spec.entry.requires == "trades":
            kwargs["trades"] = list(trades)
        elif spec.entry.requires == "breadth":
            kwargs["breadth"] = breadth
        self.impl = spec.entry.stream(**kwargs)
        self.last_date: dt.date | None = None
        self.ticker: str | None = None
        self.count = 0


def stream_update(state: StreamState, bar: PriceBar) -> tuple[StreamState, float | None]:
    if state.last_date is not None and bar.date <= state.last_date:
        raise StreamOrderError(f"{state.spec.identifier}: bar dated {bar.date} arrived after {state.last_date}")
    if state.ticker is not None and bar.ticker != state.ticker:
        raise StreamOrderError(f"{state.spec.identifier}: ticker changed from {state.ticker} to {bar.ticker}")
    value = state.impl.update(bar)
    state.last_date, state.ticker = bar.date, bar.ticker
    state.count += 1
    if value is not None and math.isnan(value):
        value = None
    return state, value


def default_catalog() -> list[IndicatorSpec]:
    """Specs for every self-contained indicator, with the usual window variations."""
    variations = {
        "ma": [5, 10, 20, 50], "ema": [5, 10, 20], "wma": [10], "rsi": [6, 14],
        "disparity": [5, 10], "bias": [6, 12], "roc": [10], "mome": [10], "atr": [14],
        "williams_r": [14], "cci": [20], "std": [20], "highest": [10], "lowest": [10],
        "rdp": [5], "mdd": [20], "ui": [14], "vroc": [10], "obv_ema": [10], "ppc": [1], "pc": [1], "ror": [20],
    }
    specs: list[IndicatorSpec] = []
    for name, entry in CATALOG.items():
        if entry.requires:
            continue
        if name in variations:
            specs.extend(IndicatorSpec(name, window=w) for w in variations[name])
        else:
            specs.append(IndicatorSpec(name))
    return specs
