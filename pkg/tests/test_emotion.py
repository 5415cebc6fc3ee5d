import datetime as dt
import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stocksignals.emotion import (EMOTIONS, EmotionLexicon, EmotionLexiconError, daily_emotion_vector, etf, idf,
                                  load_gold, load_nrc, merge_lexicons, write_vectors)

from conftest import FIXTURES

TOY = json.loads((FIXTURES / "emotion_toy_day.json").read_text())


def brute_values(docs, table):
    """Emotion tf-idf recomputed from a plain dict of word -> emotion list."""
    table = {w.lower(): set(es) for w, es in table.items()}
    out = {}
    for emo in EMOTIONS:
        counts = [sum(1 for tok in d if emo in table.get(tok.lower(), ())) for d in docs]
        df = len([c for c in counts if c > 0])
        out[emo] = sum(counts) * math.log(len(docs) / (1 + df))
    return out


@pytest.fixture
def toy_lexicon():
    return EmotionLexicon.from_emotions(TOY["lexicon"])


def test_toy_day_matches_brute_force(toy_lexicon):
    vec = daily_emotion_vector("DJIA", dt.date(2022, 1, 5), TOY["documents"], toy_lexicon)
    expected = brute_values(TOY["documents"], TOY["lexicon"])
    for emo in EMOTIONS:
        assert abs(vec.values[emo] - expected[emo]) <= 1e-12, emo
    assert vec.doc_count == 12 and not vec.no_signal


def test_idf_ln2():
    lex = EmotionLexicon.from_emotions({"fear": ["fear"]})
    docs = [["fear"]] * 4 + [["calm"]] * 6
    assert abs(idf("fear", docs, lex) - math.log(2)) <= 1e-12


def test_single_doc_example():
    lex = EmotionLexicon.from_emotions({"happy": ["joy"], "fear": ["fear"]})
    assert etf("joy", ["happy", "happy", "fear"], lex) == 2
    assert idf("joy", [["happy", "happy", "fear"]], lex) == math.log(1 / 2)


def test_no_emotion_words_gives_zero_vector():
    lex = EmotionLexicon.from_emotions({"happy": ["joy"]})
    vec = daily_emotion_vector("A", dt.date(2022, 1, 3), [["stock", "up"]], lex)
    assert vec.no_signal and all(v == 0 for v in vec.values.values())


def test_empty_day_is_none_and_errors(toy_lexicon):
    assert daily_emotion_vector("A", dt.date(2022, 1, 3), [], toy_lexicon) is None
    with pytest.raises(ValueError):
        idf("joy", [], toy_lexicon)
    with pytest.raises(EmotionLexiconError, match="unknown emotion"):
        etf("happiness", ["x"], toy_lexicon)


def test_tokenize_hook(toy_lexicon):
    class Doc:
        def __init__(self, text):
            self.text = text
    vec = daily_emotion_vector("A", dt.date(2022, 1, 3), [Doc("crash crash"), Doc("calm")], toy_lexicon,
                               tokenize=str.split)
    assert vec.etf_sum["fear"] == 2 and vec.df["fear"] == 1


def test_record_and_write(tmp_path, toy_lexicon):
    vec = daily_emotion_vector("DJIA", dt.date(2022, 1, 5), TOY["documents"], toy_lexicon)
    path = tmp_path / "v.jsonl"
    write_vectors([vec], path)
    rec = json.loads(path.read_text())
    assert rec["date"] == "2022-01-05" and rec["doc_count"] == 12 and set(EMOTIONS) <= set(rec)


WORDS = list(TOY["lexicon"]) + ["calm", "market", "bank"]
DOC = st.lists(st.sampled_from(WORDS), max_size=12)


@settings(max_examples=200, deadline=None)
@given(DOC, DOC, st.sampled_from(EMOTIONS))
def test_etf_additive_over_concatenation(a, b, emo):
    lex = EmotionLexicon.from_emotions(TOY["lexicon"])
    assert etf(emo, a + b, lex) == etf(emo, a, lex) + etf(emo, b, lex)


@settings(max_examples=100, deadline=None)
@given(st.lists(DOC, min_size=1, max_size=8), st.sampled_from(EMOTIONS))
def test_duplicating_a_day_keeps_idf_sign_rule(docs, emo):
    lex = EmotionLexicon.from_emotions(TOY["lexicon"])
    df = sum(1 for d in docs if etf(emo, d, lex))
    assert (idf(emo, docs, lex) >= 0) == (len(docs) >= 1 + df)
    assert idf(emo, docs * 2, lex) == pytest.approx(math.log(2 * len(docs) / (1 + 2 * df)), abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.lists(DOC, min_size=1, max_size=12))
def test_vector_matches_brute_force(docs):
    lex = EmotionLexicon.from_emotions(TOY["lexicon"])
    vec = daily_emotion_vector("A", dt.date(2022, 1, 3), docs, lex)
    exp = brute_values(docs, TOY["lexicon"])
    for emo in EMOTIONS:
        assert abs(vec.values[emo] - exp[emo]) <= 1e-12


def test_merge_union_and_gold_mask():
    nrc = EmotionLexicon.from_emotions({"crash": ["fear"], "hope": ["anticipation", "trust"]})
    gold = EmotionLexicon.from_emotions({"crash": ["sadness", "surprise"], "grin": ["joy"], "wow": ["surprise"]})
    merged = merge_lexicons(nrc, gold)
    assert set(merged.emotions_of("crash")) == {"fear", "sadness"}
    assert merged.emotions_of("grin") == ("joy",)
    assert "wow" not in merged  # gold has no surprise column
    assert set(merged.emotions_of("hope")) == {"anticipation", "trust"}
    assert len(merged) == 3


def test_lexicon_invariants():
    with pytest.raises(EmotionLexiconError, match="at least one"):
        EmotionLexicon({"x": (False,) * 8})
    with pytest.raises(EmotionLexiconError, match="unknown emotion"):
        EmotionLexicon.from_emotions({"x": ["glee"]})


def test_load_nrc(tmp_path):
    p = tmp_path / "nrc.tsv"
    p.write_text("abandon\tfear\t1\nabandon\tjoy\t0\nabandon\tnegative\t1\nzebra\tjoy\t0\n")
    lex = load_nrc(p)
    assert len(lex) == 1 and lex.emotions_of("abandon") == ("fear",)
    p.write_text("abandon\tfear\t1\nabandon fear 1\n")
    with pytest.raises(EmotionLexiconError, match=r"nrc\.tsv:2:"):
        load_nrc(p)


def test_load_gold(tmp_path):
    p = tmp_path / "gold.csv"
    p.write_text("word,joy,anger,sadness,fear,disgust\ngrin,4,1,1,1,1\nmeh,1,1,1,1,1\n")
    lex = load_gold(p, threshold=3.0)
    assert len(lex) == 1 and lex.emotions_of("grin") == ("joy",)
    p.write_text("word,joy\ngrin,4\nbad,x\n")
    with pytest.raises(EmotionLexiconError, match=r"gold\.csv:3:"):
        load_gold(p)
