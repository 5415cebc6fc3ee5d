import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stocksignals.keymatch import (TickerProfile, best_match, cosine_sim, edit_distance, load_profiles,
                                   match_ticker, trigrams)

PROFILES = [
    TickerProfile("MSFT", ("Microsoft", "Microsoft Corporation")),
    TickerProfile("GS", ("Goldman Sachs", "Goldman Sachs Group")),
    TickerProfile("DJIA", ("Dow Jones", "Dow Jones Industrial Average")),
]


def test_trigram_cosine_by_hand():
    # 11 trigrams of "goldman sachs" all reappear among the 17 of "goldman sachs group"
    assert len(trigrams("Goldman Sachs")) == 11 and len(trigrams("Goldman Sachs Group")) == 17
    assert cosine_sim("Goldman Sachs", "Goldman Sachs Group") == pytest.approx(11 / math.sqrt(11 * 17), abs=1e-15)


def test_short_strings_and_empty():
    assert cosine_sim("GS", "gs") == 1.0 and cosine_sim("GS", "MS") == 0.0
    with pytest.raises(ValueError):
        cosine_sim("", "x")


@pytest.mark.parametrize("a,b,d", [("kitten", "sitting", 3), ("", "abc", 3), ("Flaw", "lawn", 2), ("abc", "ABC", 0)])
def test_edit_distance_examples(a, b, d):
    assert edit_distance(a, b) == d


def test_match_examples():
    assert match_ticker(["Microsoft Corp"], PROFILES) == "MSFT"
    assert match_ticker(["weather report"], PROFILES) is None
    assert match_ticker(["Goldmann Sachs"], PROFILES) == "GS"


def test_exact_alias_wins_first():
    m = best_match(["dow jones", "Microsoft Corp"], PROFILES)
    assert m.ticker == "DJIA" and m.cosine == 1.0 and m.edit == 0


def test_tie_breaks_on_ticker():
    profiles = [TickerProfile("BBB", ("acme",)), TickerProfile("AAA", ("acme inc",))]
    assert match_ticker(["acme ind"], profiles) == "AAA"
    twins = [TickerProfile("ZZ", ("abcd",)), TickerProfile("YY", ("abce",))]
    assert match_ticker(["abcf"], twins) == "YY"


def test_empty_profiles_error():
    with pytest.raises(ValueError, match="profile"):
        match_ticker(["x"], [])
    with pytest.raises(ValueError):
        TickerProfile("X", ())


def test_load_profiles(tmp_path):
    p = tmp_path / "profiles.csv"
    p.write_text("ticker,alias\nGS,Goldman Sachs\nGS,Goldman\nMSFT,Microsoft\n")
    profiles = load_profiles(p)
    assert profiles[0] == TickerProfile("GS", ("Goldman Sachs", "Goldman"))
    p.write_text("GS,Goldman\nMS,Goldman\n")
    with pytest.raises(ValueError, match=":2: alias 'Goldman' already belongs to GS"):
        load_profiles(p)


TEXT = st.text(alphabet="abcdefg ", min_size=1, max_size=12)


@settings(max_examples=300, deadline=None)
@given(TEXT, TEXT)
def test_symmetry_and_bounds(a, b):
    assert cosine_sim(a, b) == cosine_sim(b, a)
    assert 0.0 <= cosine_sim(a, b) <= 1.0
    assert edit_distance(a, b) == edit_distance(b, a)
    assert cosine_sim(a, a) == pytest.approx(1.0) and edit_distance(a, a) == 0


@settings(max_examples=300, deadline=None)
@given(TEXT, TEXT, TEXT)
def test_edit_triangle_inequality(a, b, c):
    assert edit_distance(a, c) <= edit_distance(a, b) + edit_distance(b, c)


@settings(max_examples=200, deadline=None)
@given(st.lists(TEXT, min_size=1, max_size=3), st.floats(0.0, 1.0), st.floats(0.0, 1.0),
       st.integers(0, 4), st.integers(0, 4))
def test_threshold_monotonicity(keywords, c1, c2, e1, e2):
    profiles = [TickerProfile("A", ("abc def",)), TickerProfile("B", ("gfe dc",))]
    loose = best_match(keywords, profiles, min(c1, c2), max(e1, e2))
    strict = best_match(keywords, profiles, max(c1, c2), min(e1, e2))
    if strict is not None:
        assert loose is not None
