"""Acceptance criteria, each at its stated tolerance and time budget.

Every test carries a ``criterion`` marker; the terminal summary prints one
PASS/FAIL/SKIP line per criterion.
"""

import datetime as dt
import json
import math
import os
import random
import shutil
import threading
import time
import warnings
from pathlib import Path

import numpy as np
import pytest

from stocksignals.cli import main
from stocksignals.correlate import CorrelationReport, average_ranks, spearman
from stocksignals.emotion import (EMOTIONS, GOLD_EMOTIONS, EmotionLexicon, daily_emotion_vector, idf, load_gold,
                                  load_nrc, merge_lexicons)
from stocksignals.indicators import StreamState, compute, default_catalog, stream_update
from stocksignals.ingest import (Identity, largest_remainder, read_fiqa, read_phrasebank,
                                 stratified_split)
from stocksignals.ingest.benchmark import LabelledText
from stocksignals.lexsent import (SentimentLexicon, classify_compound, discretize_regression_label, score_counts,
                                  score_document)
from stocksignals.textprep import PrepConfig, preprocess

from conftest import FIXTURES, MINICORPUS, random_bars
from simtime import SimScheduler
from fixtures.oracle_rho import brute_spearman, oracle, rank_table

criterion = pytest.mark.criterion


# -- Spearman oracle ----------------------------------------------------------

@criterion("spearman-oracle")
def test_spearman_matches_brute_force_oracle():
    rng = np.random.default_rng(20220103)
    pairs = []
    for i in range(200):
        n = int(rng.integers(3, 501))
        if i % 2:  # heavy ties
            x = rng.integers(0, max(2, n // 5), n).astype(float)
            y = rng.integers(0, 4, n).astype(float)
        else:
            x, y = rng.normal(size=n), rng.normal(size=n)
        if len(set(x)) < 2 or len(set(y)) < 2:
            x[0], y[0] = x[0] + 1000.0, y[0] - 1000.0
        pairs.append((x.tolist(), y.tolist()))

    t0 = time.perf_counter()
    ours = [spearman(x, y) for x, y in pairs]
    elapsed = time.perf_counter() - t0
    for (x, y), rho in zip(pairs, ours):
        assert abs(rho - brute_spearman(x, y)) <= 1e-12
    assert elapsed < 5.0, f"{elapsed:.2f}s"

    for x, y in pairs[:50]:
        xs = np.array(x)
        for f in (np.exp, lambda v: v ** 3 + v):
            tx = f(xs / (np.abs(xs).max() or 1.0))
            assert average_ranks(tx).tolist() == average_ranks(xs).tolist() == rank_table(x)
            assert spearman(tx, y) == spearman(x, y)


# -- indicator equivalence ----------------------------------------------------

_BOUNDED = {"rsi": (0, 100), "stoch_k": (0, 100), "stoch_d": (0, 100), "aroon_up": (0, 100),
            "aroon_down": (0, 100), "williams_r": (-100, 0)}


@criterion("indicator-equivalence")
def test_stream_equals_batch_on_random_series():
    specs = default_catalog()
    t0 = time.perf_counter()
    for seed in range(50):
        bars = random_bars(np.random.default_rng(seed), 300, flat_every=(0, 11, 29)[seed % 3])
        for spec in specs:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                batch = compute(spec, bars).values
            state = StreamState(spec)
            stream = []
            for b in bars:
                state, v = stream_update(state, b)
                stream.append(math.nan if v is None else v)
            np.testing.assert_allclose(np.array(stream), batch, rtol=0, atol=1e-9, equal_nan=True,
                                       err_msg=f"{spec.identifier} seed={seed}")
            if spec.name in _BOUNDED:
                lo, hi = _BOUNDED[spec.name]
                defined = batch[~np.isnan(batch)]
                assert np.all((defined >= lo) & (defined <= hi)), spec.identifier
    elapsed = time.perf_counter() - t0
    assert elapsed < 30.0, f"{elapsed:.2f}s"


# -- polarity and subjectivity ------------------------------------------------

@criterion("polarity-subjectivity-exact")
def test_polarity_subjectivity_and_antisymmetry():
    s = score_counts(2, 1, 10)
    assert s.polarity == 1 / 3 and s.subjectivity == 0.1
    lex = SentimentLexicon.from_words(["gain", "good", "well", "up"], ["loss", "bad", "down", "weak"])
    # negation flips positives only, so lists with negators are not antisymmetric by design
    vocab = ["gain", "good", "well", "up", "loss", "bad", "down", "weak", "the", "stock", "market", "Gain"]
    rng = random.Random(7)
    for _ in range(100):
        tokens = [rng.choice(vocab) for _ in range(rng.randint(0, 25))]
        a, b = score_document(tokens, lex), score_document(tokens, lex.swapped())
        assert b.polarity == -a.polarity and b.subjectivity == -a.subjectivity


# -- negation -----------------------------------------------------------------

@criterion("negation")
def test_negated_sentence_is_negative():
    lex = SentimentLexicon.from_words(["well"], [], stem=True)
    cfg = PrepConfig(mode="lm")
    assert score_document(preprocess("The stock market is not doing well", cfg), lex).label == "negative"
    assert score_document(preprocess("The stock market is doing well", cfg), lex).label == "positive"


# -- emotion tf-idf -----------------------------------------------------------

@criterion("etf-idf")
def test_toy_day_against_brute_force():
    toy = json.loads((FIXTURES / "emotion_toy_day.json").read_text())
    assert len(toy["documents"]) == 12
    lex = EmotionLexicon.from_emotions(toy["lexicon"])
    vec = daily_emotion_vector(toy["ticker"], dt.date.fromisoformat(toy["date"]), toy["documents"], lex)
    table = {w.lower(): set(es) for w, es in toy["lexicon"].items()}
    n = len(toy["documents"])
    for emo in EMOTIONS:
        per_doc = [len([t for t in d if emo in table.get(t.lower(), set())]) for d in toy["documents"]]
        expected = sum(per_doc) * math.log(n / (1 + len([c for c in per_doc if c])))
        assert abs(vec.values[emo] - expected) <= 1e-12, emo
    fear = EmotionLexicon.from_emotions({"dread": ["fear"]})
    docs = [["dread"]] * 4 + [["calm"]] * 6
    assert abs(idf("fear", docs, fear) - math.log(2)) <= 1e-12


# -- lexicon merge ------------------------------------------------------------

@criterion("lexicon-merge")
def test_merge_counts_and_flag_union(tmp_path):
    rng = random.Random(3)
    nrc_words = [f"w{i:05d}" for i in range(14182)]
    gold_only = [f"g{i:05d}" for i in range(4915)]
    gold_words = rng.sample(nrc_words, 13915 - 4915) + gold_only
    nrc_flags = {w: {e for e in EMOTIONS if rng.random() < 0.3} or {rng.choice(EMOTIONS)} for w in nrc_words}
    gold_flags = {w: {e for e in GOLD_EMOTIONS if rng.random() < 0.4} or {rng.choice(GOLD_EMOTIONS)}
                  for w in gold_words}

    nrc_path, gold_path = tmp_path / "nrc.tsv", tmp_path / "gold.csv"
    with nrc_path.open("w") as fh:
        for w in nrc_words:
            for e in EMOTIONS:
                fh.write(f"{w}\t{e}\t{int(e in nrc_flags[w])}\n")
    with gold_path.open("w") as fh:
        fh.write("word," + ",".join(GOLD_EMOTIONS) + "\n")
        for w in gold_words:
            fh.write(w + "," + ",".join(str(int(e in gold_flags[w])) for e in GOLD_EMOTIONS) + "\n")

    nrc, gold = load_nrc(nrc_path), load_gold(gold_path)
    assert (len(nrc), len(gold)) == (14182, 13915)
    merged = merge_lexicons(nrc, gold)
    assert len(merged) == 19097
    for w in nrc_words + gold_only:
        assert set(merged.emotions_of(w)) == nrc_flags.get(w, set()) | gold_flags.get(w, set()), w


# -- threshold mappings -------------------------------------------------------

@criterion("threshold-mappings")
def test_closed_interval_thresholds():
    assert [classify_compound(v) for v in (0.05, -0.05, 0.0)] == ["positive", "negative", "neutral"]
    assert [discretize_regression_label(v) for v in (0.15, -0.15, 0.0)] == ["positive", "negative", "neutral"]


# -- benchmark prep -----------------------------------------------------------

def _benchmark_sources():
    root = os.environ.get("STOCKSIGNALS_BENCHMARK_DIR")
    if not root:
        return None
    root = Path(root)
    pb = root / "Sentences_66Agree.txt"
    fiqa = sorted(root.glob("task1*.json"))
    return (pb, fiqa) if pb.is_file() and fiqa else None


@criterion("benchmark-prep")
def test_benchmark_totals_on_published_sources():
    src = _benchmark_sources()
    if src is None:
        pytest.skip("published PhraseBank/FiQA files not supplied (set STOCKSIGNALS_BENCHMARK_DIR)")
    rows = read_phrasebank(src[0]) + read_fiqa(src[1])
    split = stratified_split(rows, seed=0)
    assert len(rows) == 5328
    assert [len(split[s]) for s in ("train", "test", "validation")] == [3835, 1066, 427]
    assert [sum(r.label == lab for r in rows) for lab in ("negative", "neutral", "positive")] == [961, 2770, 2033]


@criterion("benchmark-prep")
def test_benchmark_ratio_and_stratification_on_synthetic_input():
    rng = random.Random(11)
    sizes = {"negative": 847, "neutral": 2673, "positive": 1808}
    rows = [LabelledText(f"{lab} {i}", lab, "synthetic") for lab, n in sizes.items() for i in range(n)]
    rng.shuffle(rows)
    split = stratified_split(rows, seed=0)
    total = len(rows)
    assert len(split["test"]) == round(0.2 * total) == 1066
    assert len(split["validation"]) == 427 and len(split["train"]) == 3835
    test_counts = [sum(r.label == lab for r in split["test"]) for lab in sizes]
    assert test_counts == largest_remainder(list(sizes.values()), 0.2)
    for got, n in zip(test_counts, sizes.values()):
        assert abs(got - 0.2 * n) < 1
    assert sorted(r.text for part in split.values() for r in part) == sorted(r.text for r in rows)
    assert stratified_split(rows, seed=0) == split


# -- scheduler contract -------------------------------------------------------

@criterion("scheduler-contract")
def test_scheduler_under_simulated_server():
    # simulated time: the wall clock on a loaded host stalls sleeps by tens of ms
    identities = [Identity(f"agent-{i}", f"http://proxy-{i}.invalid:8080") for i in range(5)]
    sched = SimScheduler(0.05, 0.1, identities, max_concurrency=3, rng=random.Random(1))
    latency = random.Random(2)
    latencies = [latency.uniform(0.05, 0.15) for _ in range(50)]
    lock = threading.Lock()
    arrivals, used = [], []
    server = {"inflight": 0, "peak": 0}

    def simulated_server(i, ident):
        with lock:
            used.append(ident.user_agent)
            server["inflight"] += 1
            server["peak"] = max(server["peak"], server["inflight"])
        arrivals.append(sched.clock.serve(i, latencies[i]))
        with lock:
            server["inflight"] -= 1
        return i

    t0 = time.perf_counter()
    assert sched.run(50, simulated_server) == list(range(50))
    elapsed = time.perf_counter() - t0

    tol = 0.010
    starts = [d.started for d in sched.dispatches]
    for series in (starts, sorted(arrivals)):
        gaps = np.diff(series)
        assert np.all(gaps >= 0.05 - tol) and np.all(gaps <= 0.1 + tol), (gaps.min(), gaps.max())
    assert sorted(used.count(i.user_agent) for i in identities) == [10] * 5
    assert server["peak"] <= 3 and sched.max_inflight <= 3
    assert elapsed < 15.0


# -- end-to-end determinism ---------------------------------------------------

def _run_pipeline(root: Path) -> dict[str, bytes]:
    cfg = str(root / "config.toml")
    for cmd in ("ingest", "sentiment", "emotion", "correlate", "report"):
        assert main([cmd, "--config", cfg]) == 0, cmd
    return {p.name: p.read_bytes() for p in sorted((root / "out").iterdir()) if p.is_file()}


@criterion("end-to-end-determinism")
def test_pipeline_is_deterministic_and_matches_oracle(tmp_path, capsys):
    t0 = time.perf_counter()
    runs = []
    for name in ("first", "second"):
        root = tmp_path / name
        shutil.copytree(MINICORPUS, root)
        runs.append(_run_pipeline(root))
    elapsed = time.perf_counter() - t0
    capsys.readouterr()
    assert runs[0] == runs[1]
    assert {"report.txt", "correlations.csv"} <= set(runs[0])

    root = tmp_path / "first"
    signals = [line for name in ("sentiment_signals.jsonl", "emotion_signals.jsonl")
               for line in (root / "out" / name).read_text().splitlines()]
    sentiment = [json.loads(l) for l in signals if json.loads(l)["channel"].endswith("_sentiment")]
    assert {r["ticker"] for r in sentiment} == {"DJIA", "GS", "MSFT"}
    assert len({r["channel"] for r in sentiment}) == 4
    assert len({r["date"] for r in sentiment}) == 30

    expected = oracle(str(root / "prices.csv"),
                      [str(root / "out" / "sentiment_signals.jsonl"), str(root / "out" / "emotion_signals.jsonl")])
    report = CorrelationReport.from_csv(runs[0]["correlations.csv"].decode())
    assert {(r.ticker, r.channel) for r in report.rows} == set(expected)
    for row in report.rows:
        want = expected[(row.ticker, row.channel)]
        if want is None:
            assert row.rho is None, (row.ticker, row.channel)
        else:
            assert abs(row.rho - want) <= 1e-12, (row.ticker, row.channel)
    assert sum(r.rho is not None for r in report.rows) >= 12
    assert elapsed < 60.0, f"{elapsed:.1f}s"
