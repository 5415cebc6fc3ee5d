"""Regenerate the bundled mini-corpus under ``tests/fixtures/minicorpus``.

Three tickers, thirty trading days, four text channels. Document tone is
tied to the day's return plus noise so correlations are non-trivial. The
output is fully determined by ``SEED``; rerunning rewrites identical files.

    python tests/fixtures/make_minicorpus.py
"""

from __future__ import annotations

import csv
import datetime as dt
import json
import random
from pathlib import Path

SEED = 20220103
OUT = Path(__file__).resolve().parent / "minicorpus"
TICKERS = {"DJIA": 36000.0, "GS": 380.0, "MSFT": 330.0}
ALIASES = {
    "DJIA": ["Dow Jones", "Dow Jones Industrial Average", "DJIA"],
    "GS": ["Goldman Sachs", "GS"],
    "MSFT": ["Microsoft", "Microsoft Corporation", "MSFT"],
}
SOURCES = ("twitter", "news_archive", "radio_transcript", "news_api")
FIRST_BAR = dt.date(2021, 12, 31)
START, N_DAYS = dt.date(2022, 1, 3), 30

POSITIVE = "good great strong gain growth profit rally surge beat upbeat optimistic solid".split()
NEGATIVE = "bad weak loss decline fall drop slump miss risk poor crash gloomy".split()
FILLER = "shares company market today traders report quarter analysts investors session index outlook".split()
EMO_POS = "happy glad hopeful proud wonderful calm yay wow".split()
EMO_NEG = "sad angry afraid scary fearful nervous upset terrible awful horrible ugh".split()

NRC = {
    "happy": ["joy", "anticipation", "trust"], "glad": ["joy"], "hopeful": ["anticipation", "joy", "trust"],
    "proud": ["anticipation", "joy", "trust"], "wonderful": ["joy", "surprise", "trust"], "calm": ["trust"],
    "sad": ["sadness"], "angry": ["anger", "disgust"], "afraid": ["fear"], "scary": ["fear", "surprise"],
    "fearful": ["fear", "sadness"], "nervous": ["anticipation", "fear"], "upset": ["anger", "sadness"],
    "terrible": ["anger", "disgust", "fear", "sadness"], "awful": ["anger", "disgust", "fear", "sadness"],
    "horrible": ["anger", "disgust", "fear"], "crash": ["fear", "sadness", "surprise"],
    "profit": ["anticipation", "joy", "trust"], "loss": ["anger", "fear", "sadness"],
}
GOLD = {  # joy, anger, sadness, fear, disgust on a 1-5 scale
    "yay": (4.6, 1.0, 1.0, 1.0, 1.0), "ugh": (1.0, 2.8, 2.0, 1.2, 3.9), "wow": (3.8, 1.0, 1.0, 1.4, 1.0),
    "gloomy": (1.0, 1.5, 4.2, 2.1, 1.2), "happy": (4.9, 1.0, 1.0, 1.0, 1.0),
}
EMOTIONS = ("anger", "anticipation", "disgust", "fear", "joy", "sadness", "surprise", "trust")


def trading_days() -> list[dt.date]:
    days, d = [], START
    while len(days) < N_DAYS:
        if d.weekday() < 5:
            days.append(d)
        d += dt.timedelta(days=1)
    return days


def sentence(rng: random.Random, tone: float, emotional: bool) -> str:
    """A few filler words plus sentiment words whose balance follows ``tone``."""
    words = rng.sample(FILLER, 3)
    n_hits = rng.randint(0, 3)
    for _ in range(n_hits):
        if rng.random() < (1 + tone) / 2:
            word = rng.choice(POSITIVE)
            # occasionally negate a positive word
            words += ["not", word] if rng.random() < 0.1 else [word]
        else:
            words.append(rng.choice(NEGATIVE))
    if emotional:
        pool = EMO_POS if rng.random() < (1 + tone) / 2 else EMO_NEG
        words += rng.sample(pool, rng.randint(1, 2))
    rng.shuffle(words)
    text = " ".join(words)
    return text[0].upper() + text[1:] + rng.choice([".", "!", "", " #stocks"])


def main() -> None:
    rng = random.Random(SEED)
    OUT.mkdir(parents=True, exist_ok=True)
    (OUT / "responses").mkdir(exist_ok=True)
    days = trading_days()

    price_rows, returns = [], {}
    for ticker, level in TICKERS.items():
        close = level
        bars = [(FIRST_BAR, close)]
        for d in days:
            close = round(close * (1 + rng.gauss(0.0, 0.012)), 2)
            bars.append((d, close))
        returns[ticker] = {d: (c - p) / p for (d, c), (_, p) in zip(bars[1:], bars[:-1])}
        for d, c in bars:
            hi, lo = round(c * (1 + abs(rng.gauss(0, 0.004))), 2), round(c * (1 - abs(rng.gauss(0, 0.004))), 2)
            op = round(rng.uniform(lo, hi), 2)
            price_rows.append([ticker, d.isoformat(), op, hi, lo, c, rng.randint(1_000_000, 9_000_000)])
    with open(OUT / "prices.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["ticker", "date", "open", "high", "low", "close", "volume"])
        w.writerows(price_rows)

    calendar = [START + dt.timedelta(days=i) for i in range((days[-1] - START).days + 1)]
    endpoints = {s: f"https://fixtures.invalid/{s}" for s in SOURCES}
    for source in SOURCES:
        responses = []
        for ticker in TICKERS:
            for d in calendar:
                url = f"{endpoints[source]}?q={ticker}&from={d}&to={d}"
                records = []
                if d in returns[ticker]:
                    tone = max(-0.95, min(0.95, 40 * returns[ticker][d] + rng.gauss(0, 0.35)))
                    n_docs = rng.randint(1, 4)
                    for k in range(n_docs):
                        text = sentence(rng, tone, emotional=(source == "twitter"))
                        rec = {"id": f"{source}-{ticker}-{d:%Y%m%d}-{k}", "date": d.isoformat(), "text": text}
                        if source == "twitter":
                            rec.update(likes=rng.randint(0, 50), retweets=rng.randint(0, 10),
                                       replies=rng.randint(0, 5))
                        if source == "news_archive":
                            rec["keywords"] = [rng.choice(ALIASES[ticker]) + rng.choice(["", " Group", " Inc"])]
                        records.append(rec)
                    if rng.random() < 0.2:
                        # a re-fetched copy differing only in case and whitespace
                        dup = dict(records[0], id=records[0]["id"] + "-dup", text="  " + records[0]["text"].upper() + " ")
                        records.append(dup)
                    if source == "news_archive" and rng.random() < 0.15:
                        records.append({"id": f"offtopic-{ticker}-{d:%Y%m%d}", "date": d.isoformat(),
                                        "text": "Weather report calls for rain", "keywords": ["weather report"]})
                if source == "news_api":
                    body = {"feed": [{"url": r["id"], "time_published": f"{d:%Y%m%d}T093000",
                                      "title": r["text"], "summary": ""} for r in records]}
                else:
                    body = {"documents": records}
                responses.append({"url": url, "status": 200, "body": body})
        (OUT / "responses" / f"{source}.json").write_text(json.dumps({"responses": responses}, indent=1) + "\n")

    with open(OUT / "lexicon.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["word", "category"])
        w.writerows([(x, "positive") for x in POSITIVE] + [(x, "negative") for x in NEGATIVE])
    with open(OUT / "nrc.tsv", "w") as fh:
        for word in sorted(NRC):
            for e in EMOTIONS:
                fh.write(f"{word}\t{e}\t{int(e in NRC[word])}\n")
    with open(OUT / "gold.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["word", "joy", "anger", "sadness", "fear", "disgust"])
        for word in sorted(GOLD):
            w.writerow([word, *GOLD[word]])
    with open(OUT / "profiles.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["ticker", "alias"])
        for t, aliases in ALIASES.items():
            w.writerows((t, a) for a in aliases)

    sources_toml = "\n".join(
        f'[sources.{s}]\nendpoint = "{endpoints[s]}"\nformat = "{"alphavantage" if s == "news_api" else "documents"}"\n'
        f'fixtures = ["responses/{s}.json"]\nmin_delay = 0.0\nmax_delay = 0.0\n'
        for s in SOURCES)
    (OUT / "config.toml").write_text(f"""\
tickers = {json.dumps(list(TICKERS))}
start = {START.isoformat()}
end = {days[-1].isoformat()}
out = "out"
seed = 0

[paths]
prices = "prices.csv"
store = "out/corpus"
lexicon = "lexicon.csv"
emotion_lexicon = "nrc.tsv"
gold_lexicon = "gold.csv"
profiles = "profiles.csv"

[prep]
twitter = "twitter"
news_archive = "generic"
radio_transcript = "generic"
news_api = "generic"

[aggregation]
weighted_engagement = false
mode = "polarity"
permutations = 0
gold_threshold = 3.0

{sources_toml}""")


if __name__ == "__main__":
    main()
