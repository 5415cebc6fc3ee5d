import datetime as dt

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stocksignals.textprep import (DocumentError, Engagement, PrepConfig, SpellingCorrector, TextDocument,
                                   correct_spelling, emotion_tokens, pos_filter, preprocess, rule_tag,
                                   suffix_lemma)
from stocksignals.textprep.pipeline import strip_punctuation
from stocksignals.textprep.resources import default_frequencies

LM = PrepConfig(mode="lm")
TWITTER = PrepConfig(mode="twitter")
GENERIC = PrepConfig()


def osa_distance(a: str, b: str) -> int:
    """Optimal string alignment distance (adjacent transpositions count 1)."""
    d = [[0] * (len(b) + 1) for _ in range(len(a) + 1)]
    for i in range(len(a) + 1):
        d[i][0] = i
    for j in range(len(b) + 1):
        d[0][j] = j
    for i in range(1, len(a) + 1):
        for j in range(1, len(b) + 1):
            cost = a[i - 1] != b[j - 1]
            d[i][j] = min(d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + cost)
            if i > 1 and j > 1 and a[i - 1] == b[j - 2] and a[i - 2] == b[j - 1]:
                d[i][j] = min(d[i][j], d[i - 2][j - 2] + 1)
    return d[len(a)][len(b)]


def brute_correct(word: str, freq: dict) -> str:
    if word in freq:
        return word
    best = {1: [], 2: []}
    for w, c in freq.items():
        if abs(len(w) - len(word)) > 2:
            continue
        k = osa_distance(word, w)
        if k in best:
            best[k].append((-c, w))
    for k in (1, 2):
        if best[k]:
            return min(best[k])[1]
    return word


def test_lm_example():
    doc = TextDocument("1", dt.date(2022, 1, 3), "AAPL", "news_api", "@Apple is booming! http://t.co/x")
    assert preprocess(doc, LM) == ["Apple", "boom"]


def test_empty_text():
    assert preprocess("", TWITTER) == []


def test_contraction_expanded_in_twitter_mode_only():
    assert preprocess("won't", TWITTER) == ["will", "not"]
    assert preprocess("won't", LM) == ["won't"]


def test_hashtag_dropped_mention_kept_url_removed():
    out = preprocess("Great day for @Tesla #bullrun see www.example.com/x", GENERIC)
    assert "Tesla" in out and not any(t.startswith("#") or "bullrun" in t for t in out)
    assert not any("example" in t for t in out)


def test_unicode_stripped_case_preserved():
    assert preprocess("Markets 🚀 Rally", GENERIC) == ["Markets", "Rally"]


def test_punctuation_and_brackets():
    assert strip_punctuation(["(Apple)", "won't", "[x]"]) == ["Apple", "won't", "x"]


def test_mode_invariants():
    assert LM.stemming and not LM.expand_contractions
    assert TWITTER.replace_slang and TWITTER.expand_contractions and TWITTER.correct_spelling
    with pytest.raises(ValueError):
        PrepConfig(mode="other")


@pytest.mark.parametrize("word,expected", [("speling", "spelling"), ("stock", "stock"), ("zzxqv", "zzxqv")])
def test_spelling_examples(word, expected):
    assert correct_spelling(word) == expected


@pytest.mark.parametrize("word", ["speling", "markt", "invester", "recieve", "stcok", "proffit"])
def test_spelling_matches_brute_force(word):
    freq = default_frequencies()
    assert correct_spelling(word) == brute_correct(word, freq)


def test_spelling_tiebreak_and_custom_dictionary():
    sc = SpellingCorrector({"cat": 5, "cut": 5, "cot": 1})
    assert sc.correct("cxt") == "cat"
    assert sc.correct("123") == "123"


def test_pos_filter_examples():
    assert pos_filter([("terribly", "ADV"), ("bad", "ADJ"), ("stock", "NOUN")]) == ["terribly", "bad"]
    assert pos_filter([("stock", "NOUN"), ("market", "NOUN")]) == []
    assert pos_filter([("wow", "INTJ")]) == ["wow"]
    assert pos_filter([("good", "JJ"), ("very", "RB"), ("run", "VB")]) == ["good", "very"]


def test_pos_filter_requires_tags():
    with pytest.raises(TypeError, match="tagger"):
        pos_filter(["terribly", "bad"])


def test_emotion_tokens_use_tagger():
    assert emotion_tokens("Wow, the terribly bad stock had a happy day!") == ["Wow", "terribly", "bad", "happy"]
    assert rule_tag(["quickly"]) == [("quickly", "ADV")]


def test_suffix_lemma():
    assert suffix_lemma("companies") == "company"
    assert suffix_lemma("losses") == "loss"
    assert suffix_lemma("running") == "run"
    assert suffix_lemma("Apple") == "Apple"


def test_document_invariants():
    with pytest.raises(DocumentError, match="source"):
        TextDocument("1", dt.date(2022, 1, 1), "A", "blog", "x")
    with pytest.raises(DocumentError, match="engagement"):
        TextDocument("1", dt.date(2022, 1, 1), "A", "news_api", "x", Engagement(1, 2, 3))
    doc = TextDocument("1", dt.date(2022, 1, 1), "A", "twitter", "x", Engagement(1, 2, 3))
    assert TextDocument.from_record(doc.to_record()) == doc


WORDS = ["Apple", "stocks", "rallied", "the", "market", "isn't", "falling", "growth", "@Nike", "#earnings",
         "booming", "companies", "don't", "Investors", "happily", "(Q3)", "profits!", "http://x.co/a",
         "losses", "running", "gr8", "lol", "u", "rates", "café", "DOW", "n't"]


@settings(max_examples=150, deadline=None)
@given(st.lists(st.sampled_from(WORDS), max_size=15), st.sampled_from(["generic", "lm"]))
def test_idempotent(words, mode):
    cfg = PrepConfig(mode=mode)
    once = preprocess(" ".join(words), cfg)
    assert preprocess(" ".join(once), cfg) == once


@settings(max_examples=100, deadline=None)
@given(st.lists(st.sampled_from(WORDS), max_size=15), st.sampled_from(["generic", "lm", "twitter"]))
def test_case_and_length(words, mode):
    cfg = PrepConfig(mode=mode)
    out = preprocess(" ".join(words), cfg)
    source = " ".join(words)
    # nothing is lowercased: every capitalised output token comes from a capitalised input
    for tok in out:
        if tok[:1].isupper():
            assert tok[:1] in source
    pieces = strip_punctuation(source.split())
    if mode == "twitter":
        widest = lambda m: max(len(v.split()) for v in m.values())  # noqa: E731
        assert len(out) <= len(pieces) * widest(cfg.slang_map) * widest(cfg.contraction_map)
    else:
        assert len(out) <= len(pieces)
    if mode == "lm":
        # contractions survive untouched for the negation scan
        for w in ("isn't", "don't"):
            if w in words:
                assert w in out
