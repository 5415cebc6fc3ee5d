"""``stocksignals`` command line: ingest, score, correlate and report.

Settings come from a TOML file (``--config``); flags override it. Every
command writes its outputs under the output directory with stable
ordering, so reruns on unchanged inputs are byte-identical.
"""

from __future__ import annotations

import argparse
import datetime as dt
import json
import logging
import sys
from collections import defaultdict
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

try:
    import tomllib as tomli
except ModuleNotFoundError:  # Python < 3.11
    import tomli

from . import __version__
from .correlate import (CorrelationReport, DailySignal, ScoredDocument, aggregate_daily,
                        correlate_returns, emotion_signals, resolve_channel)
from .emotion import EmotionLexicon, daily_emotion_vector, load_gold, load_nrc, merge_lexicons, write_vectors
from .indicators import IndicatorSpec, UnknownIndicatorError, compute_all, default_catalog
from .ingest import CorpusStore, IngestError, SourceConfig, dedup_store, fetch, prepare_benchmark
from .ingest.scheduler import PoliteScheduler
from .ingest.transport import FixtureTransport
from .keymatch import load_profiles
from .lexsent import LexiconError, PipeScorer, external_scorer, load_lexicon, score_document
from .lexsent.external import BackendError
from .marketdata import PriceDataError, compute_returns, load_prices
from .textprep import DocumentError, PrepConfig, emotion_tokens, preprocess
from .textprep.pipeline import MODES, SOURCES

log = logging.getLogger("stocksignals")

COMMANDS = ("ingest", "indicators", "sentiment", "emotion", "correlate", "report", "prepare-benchmark")
EXIT_USAGE, EXIT_CONFIG, EXIT_DATA, EXIT_SOURCE = 2, 3, 4, 5

SENTIMENT_FILE = "sentiment_signals.jsonl"
EMOTION_FILE = "emotion_signals.jsonl"
VECTORS_FILE = "emotion_vectors.jsonl"
CORRELATIONS_FILE = "correlations.csv"
REPORT_FILE = "report.txt"


class ConfigError(Exception):
    def __init__(self, problems: Sequence[str]):
        super().__init__("\n".join(f"  - {p}" for p in problems))
        self.problems = list(problems)


@dataclass
class PipelineConfig:
    base: Path = field(default_factory=Path.cwd)
    out: Path = Path("out")
    tickers: list[str] = field(default_factory=list)
    start: dt.date | None = None
    end: dt.date | None = None
    paths: dict[str, object] = field(default_factory=dict)
    prep: dict[str, str] = field(default_factory=dict)
    sources: dict[str, SourceConfig] = field(default_factory=dict)
    fixtures: dict[str, list[Path]] = field(default_factory=dict)
    weighted_engagement: bool = False
    aggregation_mode: str = "polarity"
    permutations: int = 0
    lag: int = 0
    seed: int = 0
    gold_threshold: float = 0.0
    scorer_command: list[str] = field(default_factory=list)

    def path(self, key: str) -> Path | None:
        v = self.paths.get(key)
        return None if v is None else Path(v)

    def prep_mode(self, source: str) -> str:
        return self.prep.get(source, "twitter" if source == "twitter" else "generic")


_PATH_KEYS = ("prices", "store", "lexicon", "emotion_lexicon", "gold_lexicon", "profiles", "phrasebank", "fiqa")
_SOURCE_KEYS = {"endpoint", "query", "auth_env", "min_delay", "max_delay", "user_agents", "proxies", "rotate",
                "max_concurrency", "format", "live", "fixtures"}


def _as_date(v, what: str, problems: list[str]) -> dt.date | None:
    if v is None or isinstance(v, dt.date):
        return v
    try:
        return dt.date.fromisoformat(str(v))
    except ValueError:
        problems.append(f"{what}: {v!r} is not an ISO date")
        return None


def load_config(path: str | Path | None) -> PipelineConfig:
    """Parse and structurally check a TOML config; all problems are reported together."""
    if path is None:
        return PipelineConfig()
    path = Path(path)
    try:
        raw = tomli.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError([f"config file {path} does not exist"]) from None
    except tomli.TOMLDecodeError as exc:
        raise ConfigError([f"{path}: {exc}"]) from None
    base = path.resolve().parent
    problems: list[str] = []
    cfg = PipelineConfig(base=base)

    def rel(p):
        return (base / p) if not Path(p).is_absolute() else Path(p)

    known = {"out", "tickers", "start", "end", "seed", "paths", "prep", "aggregation", "sources", "scorer"}
    for key in sorted(set(raw) - known):
        problems.append(f"unknown top-level key {key!r}")
    cfg.out = rel(raw.get("out", "out"))
    tickers = raw.get("tickers", [])
    if not isinstance(tickers, list) or not all(isinstance(t, str) for t in tickers):
        problems.append("tickers must be a list of strings")
    else:
        cfg.tickers = tickers
    cfg.start = _as_date(raw.get("start"), "start", problems)
    cfg.end = _as_date(raw.get("end"), "end", problems)
    cfg.seed = int(raw.get("seed", 0))

    paths = raw.get("paths", {})
    for key in sorted(set(paths) - set(_PATH_KEYS)):
        problems.append(f"paths: unknown key {key!r}")
    for key in _PATH_KEYS:
        if key in paths:
            v = paths[key]
            cfg.paths[key] = [rel(p) for p in v] if isinstance(v, list) else rel(v)

    for src, mode in raw.get("prep", {}).items():
        if src not in SOURCES:
            problems.append(f"prep: unknown source {src!r}")
        elif mode not in MODES:
            problems.append(f"prep.{src}: mode {mode!r} not one of {MODES}")
        else:
            cfg.prep[src] = mode
    if cfg.prep.get("twitter", "twitter") != "twitter":
        problems.append("prep.twitter: the twitter source requires the 'twitter' preprocessing mode")

    agg = raw.get("aggregation", {})
    cfg.weighted_engagement = bool(agg.get("weighted_engagement", False))
    cfg.aggregation_mode = agg.get("mode", "polarity")
    if cfg.aggregation_mode not in ("polarity", "label"):
        problems.append(f"aggregation.mode: {cfg.aggregation_mode!r} not one of ('polarity', 'label')")
    cfg.permutations = int(agg.get("permutations", 0))
    if cfg.permutations < 0:
        problems.append("aggregation.permutations must be >= 0")
    cfg.lag = int(agg.get("lag", 0))
    cfg.gold_threshold = float(agg.get("gold_threshold", 0.0))

    cfg.scorer_command = list(raw.get("scorer", {}).get("command", []))

    for name, body in raw.get("sources", {}).items():
        unknown = set(body) - _SOURCE_KEYS
        for key in sorted(unknown):
            problems.append(f"sources.{name}: unknown key {key!r}")
        kw = {k: v for k, v in body.items() if k in _SOURCE_KEYS and k != "fixtures"}
        kw.setdefault("endpoint", f"fixture://{name}")
        sc = None
        try:
            sc = SourceConfig.from_mapping({"source": name, **kw})
        except (TypeError, ValueError) as exc:
            problems.append(f"sources.{name}: {exc}")
        if sc is not None:
            cfg.sources[name] = sc
        cfg.fixtures[name] = [rel(p) for p in body.get("fixtures", [])]

    if problems:
        raise ConfigError(problems)
    return cfg


def validate(cfg: PipelineConfig, command: str) -> None:
    """Check that every file the command reads exists."""
    needs = {
        "ingest": [],
        "indicators": ["prices"],
        "sentiment": ["lexicon"],
        "emotion": ["emotion_lexicon"],
        "correlate": ["prices"],
        "report": ["prices"],
        "prepare-benchmark": ["phrasebank", "fiqa"],
    }[command]
    problems = []
    for key in needs:
        if key not in cfg.paths:
            problems.append(f"paths.{key} is required by '{command}'")
    for key, v in cfg.paths.items():
        if key == "store" or (key not in needs and key not in ("gold_lexicon", "profiles")):
            continue
        for p in (v if isinstance(v, list) else [v]):
            if not Path(p).exists():
                problems.append(f"paths.{key}: {p} does not exist")
    if cfg.start and cfg.end and cfg.end < cfg.start:
        problems.append(f"date range is empty: {cfg.start} > {cfg.end}")
    if command == "ingest":
        if not cfg.sources:
            problems.append("ingest needs at least one [sources.<name>] table")
        if not cfg.tickers:
            problems.append("ingest needs tickers (config 'tickers' or --ticker)")
        if not (cfg.start and cfg.end):
            problems.append("ingest needs a date range (config start/end or --from/--to)")
        for name, sc in cfg.sources.items():
            fx = cfg.fixtures.get(name, [])
            if not fx and not sc.live:
                problems.append(f"sources.{name}: no fixtures given and live fetching is disabled")
            for p in fx:
                if not p.exists():
                    problems.append(f"sources.{name}: fixture {p} does not exist")
    if problems:
        raise ConfigError(problems)


def _dump_jsonl(path: Path, records: list[dict]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("".join(json.dumps(r) + "\n" for r in records), encoding="utf-8")


def _store(cfg: PipelineConfig) -> CorpusStore:
    return CorpusStore(cfg.path("store") or cfg.out / "corpus")


def _selected_tickers(cfg: PipelineConfig, available) -> list[str]:
    avail = sorted(available)
    return [t for t in avail if t in cfg.tickers] if cfg.tickers else avail


# -- commands ---------------------------------------------------------------

def cmd_ingest(cfg: PipelineConfig, args) -> int:
    store = _store(cfg)
    profiles = load_profiles(cfg.path("profiles")) if cfg.path("profiles") else None
    total = 0
    for name in sorted(cfg.sources):
        sc = cfg.sources[name]
        fx = cfg.fixtures.get(name, [])
        if fx:
            transport = FixtureTransport.load(*fx)
            sched = PoliteScheduler(0.0, 0.0, sc.identities, 1, name=name)
        else:
            transport, sched = None, None
        for ticker in sorted(cfg.tickers):
            docs = fetch(sc, ticker, (cfg.start, cfg.end), transport=transport, scheduler=sched,
                         profiles=profiles)
            n = dedup_store(docs, store)
            total += n
            print(f"{name}\t{ticker}\tfetched={len(docs)}\tstored={n}")
    print(f"stored {total} new documents in {store.root}")
    return 0


def cmd_indicators(cfg: PipelineConfig, args) -> int:
    prices = load_prices(cfg.path("prices"))
    specs = [IndicatorSpec.parse(s) for s in args.spec] if args.spec else default_catalog()
    cfg.out.mkdir(parents=True, exist_ok=True)
    for ticker in _selected_tickers(cfg, prices):
        bars = [b for b in prices[ticker] if (cfg.start is None or b.date >= cfg.start)
                and (cfg.end is None or b.date <= cfg.end)]
        table = compute_all(specs, bars)
        for spec_id, err in table.errors.items():
            log.error("%s %s: %s", ticker, spec_id, err)
        out = cfg.out / f"indicators_{ticker}.csv"
        out.write_text(table.to_csv(), encoding="utf-8")
        print(f"wrote {out}")
    return 0


def _documents(cfg: PipelineConfig, sources):
    store = _store(cfg)
    tickers = set(cfg.tickers)
    for doc in store.documents(start=cfg.start, end=cfg.end):
        if doc.source in sources and (not tickers or doc.ticker in tickers):
            yield doc


def sentiment_signals(cfg: PipelineConfig, weighted: bool) -> list[DailySignal]:
    lex_path = cfg.path("lexicon")
    lexicons = {}
    scorer = PipeScorer(cfg.scorer_command) if cfg.scorer_command else None
    preps = {s: PrepConfig(mode=cfg.prep_mode(s)) for s in SOURCES}
    groups: dict[tuple, list[ScoredDocument]] = defaultdict(list)
    try:
        for doc in _documents(cfg, SOURCES):
            channel = f"{doc.source}_sentiment"
            if scorer is not None:
                score = external_scorer(doc, scorer)
            else:
                mode = preps[doc.source].mode
                if mode not in lexicons:
                    lexicons[mode] = load_lexicon(lex_path, stem=(mode == "lm"))
                score = score_document(preprocess(doc, preps[doc.source]), lexicons[mode])
            groups[(doc.ticker, doc.date, channel)].append(
                ScoredDocument(doc.ticker, doc.date, channel, score, doc.engagement))
    finally:
        if scorer is not None:
            scorer.close()
    out = []
    for key in sorted(groups):
        sig = aggregate_daily(groups[key], weighted=weighted, mode=cfg.aggregation_mode)
        if sig is not None:
            out.append(sig)
    return out


def _emotion_lexicon(cfg: PipelineConfig) -> EmotionLexicon:
    lex = load_nrc(cfg.path("emotion_lexicon"))
    if cfg.path("gold_lexicon"):
        lex = merge_lexicons(lex, load_gold(cfg.path("gold_lexicon"), cfg.gold_threshold))
    return lex


def emotion_outputs(cfg: PipelineConfig):
    lex = _emotion_lexicon(cfg)
    prep = PrepConfig(mode="generic")
    days: dict[tuple, list[list[str]]] = defaultdict(list)
    for doc in _documents(cfg, ("twitter",)):
        days[(doc.ticker, doc.date)].append(emotion_tokens(doc.text, cfg=prep))
    vectors, signals = [], []
    for (ticker, date) in sorted(days):
        vec = daily_emotion_vector(ticker, date, days[(ticker, date)], lex)
        if vec is None:
            continue
        vectors.append(vec)
        signals.extend(emotion_signals(vec))
    return vectors, signals


def cmd_sentiment(cfg: PipelineConfig, args) -> int:
    sigs = sentiment_signals(cfg, cfg.weighted_engagement)
    path = cfg.out / SENTIMENT_FILE
    _dump_jsonl(path, [s.to_record() for s in sigs])
    print(f"wrote {len(sigs)} daily signals to {path}")
    return 0


def cmd_emotion(cfg: PipelineConfig, args) -> int:
    vectors, sigs = emotion_outputs(cfg)
    cfg.out.mkdir(parents=True, exist_ok=True)
    write_vectors(vectors, cfg.out / VECTORS_FILE)
    _dump_jsonl(cfg.out / EMOTION_FILE, [s.to_record() for s in sigs])
    print(f"wrote {len(vectors)} emotion vectors to {cfg.out / VECTORS_FILE}")
    return 0


def _load_signals(cfg: PipelineConfig) -> list[DailySignal]:
    """Signals from earlier ``sentiment``/``emotion`` runs, computed on the fly if absent."""
    sigs: list[DailySignal] = []
    spath, epath = cfg.out / SENTIMENT_FILE, cfg.out / EMOTION_FILE
    if spath.exists():
        sigs += [DailySignal.from_record(json.loads(l)) for l in spath.read_text(encoding="utf-8").splitlines() if l]
    elif "lexicon" in cfg.paths:
        sigs += sentiment_signals(cfg, cfg.weighted_engagement)
    if epath.exists():
        sigs += [DailySignal.from_record(json.loads(l)) for l in epath.read_text(encoding="utf-8").splitlines() if l]
    elif "emotion_lexicon" in cfg.paths:
        sigs += emotion_outputs(cfg)[1]
    return sigs


def correlation_report(cfg: PipelineConfig, channel: str | None) -> CorrelationReport:
    prices = load_prices(cfg.path("prices"))
    returns = {t: compute_returns(prices[t]) for t in _selected_tickers(cfg, prices)}
    sigs = [s for s in _load_signals(cfg)
            if s.ticker in returns and (channel is None or s.channel == channel)
            and (cfg.start is None or s.date >= cfg.start) and (cfg.end is None or s.date <= cfg.end)]
    return correlate_returns(returns, sigs, lag=cfg.lag, permutations=cfg.permutations or None, seed=cfg.seed)


def cmd_correlate(cfg: PipelineConfig, args) -> int:
    report = correlation_report(cfg, args.channel)
    path = cfg.out / CORRELATIONS_FILE
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(report.to_csv(), encoding="utf-8")
    sys.stdout.write(report.to_csv())
    return 0


def cmd_report(cfg: PipelineConfig, args) -> int:
    path = cfg.out / CORRELATIONS_FILE
    if path.exists() and args.channel is None:
        report = CorrelationReport.from_csv(path.read_text(encoding="utf-8"))
    else:
        report = correlation_report(cfg, args.channel)
    out = cfg.out / REPORT_FILE
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(report.to_text(), encoding="utf-8")
    sys.stdout.write(report.to_text())
    return 0


def cmd_prepare_benchmark(cfg: PipelineConfig, args) -> int:
    paths = prepare_benchmark(cfg.path("phrasebank"), cfg.paths["fiqa"], cfg.out / "benchmark", seed=cfg.seed)
    for name, p in paths.items():
        n = sum(1 for _ in p.open(encoding="utf-8")) - 1
        print(f"{name}\t{n}\t{p}")
    return 0


HANDLERS = {
    "ingest": cmd_ingest, "indicators": cmd_indicators, "sentiment": cmd_sentiment,
    "emotion": cmd_emotion, "correlate": cmd_correlate, "report": cmd_report,
    "prepare-benchmark": cmd_prepare_benchmark,
}


def _iso(s: str) -> dt.date:
    try:
        return dt.date.fromisoformat(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{s!r} is not an ISO date (YYYY-MM-DD)") from None


def _channel(s: str) -> str:
    try:
        return resolve_channel(s)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="TOML pipeline config")
    common.add_argument("--ticker", metavar="SYM", help="restrict to one ticker")
    common.add_argument("--from", dest="start", type=_iso, metavar="DATE", help="first date (inclusive)")
    common.add_argument("--to", dest="end", type=_iso, metavar="DATE", help="last date (inclusive)")
    common.add_argument("--channel", type=_channel, metavar="NAME",
                        help="one channel, e.g. news_archive or fear")
    common.add_argument("--spec", action="append", default=[], metavar="NAME:k=v[,k=v]",
                        help="indicator spec (repeatable); default is the whole catalog")
    common.add_argument("--lag", type=int, metavar="K", help="pair signal at t with return at t+K")
    common.add_argument("--seed", type=int, metavar="N", help="seed for permutations and splits")
    common.add_argument("--weighted-engagement", action="store_true", default=None,
                        help="weight tweets by 1 + likes + retweets")
    common.add_argument("--out", metavar="DIR", help="output directory")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="stocksignals", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True
    helps = {
        "ingest": "fetch documents (fixture replay or live) into the corpus store",
        "indicators": "compute technical indicators from the price file",
        "sentiment": "score stored documents and aggregate per day and channel",
        "emotion": "daily emotion tf-idf vectors from tweets",
        "correlate": "Spearman correlation of daily signals with returns",
        "report": "plain-text correlation tables",
        "prepare-benchmark": "build train/test/validation CSVs from PhraseBank and FiQA",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def apply_flags(cfg: PipelineConfig, args) -> PipelineConfig:
    cfg = replace(cfg, paths=dict(cfg.paths))
    if args.ticker:
        cfg.tickers = [args.ticker]
    if args.start:
        cfg.start = args.start
    if args.end:
        cfg.end = args.end
    if args.lag is not None:
        cfg.lag = args.lag
    if args.seed is not None:
        cfg.seed = args.seed
    if args.weighted_engagement:
        cfg.weighted_engagement = True
    if args.out:
        cfg.out = Path(args.out)
    return cfg


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = apply_flags(load_config(args.config), args)
        validate(cfg, args.command)
        return HANDLERS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"error (config): {len(exc.problems)} problem(s)\n{exc}", file=sys.stderr)
        return EXIT_CONFIG
    except UnknownIndicatorError as exc:
        print(f"error (config): {exc.args[0]}", file=sys.stderr)
        return EXIT_CONFIG
    except (PriceDataError, LexiconError, DocumentError, ValueError) as exc:
        print(f"error (data): {exc}", file=sys.stderr)
        return EXIT_DATA
    except (IngestError, BackendError, FileNotFoundError) as exc:
        print(f"error (source): {exc}", file=sys.stderr)
        return EXIT_SOURCE


if __name__ == "__main__":
    sys.exit(main())
