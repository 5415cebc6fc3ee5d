"""Rule-based fallbacks for lemmatization and part-of-speech tagging.

Both are deliberately small. Any callable with the same signature (for
example a wrapper around a statistical tagger) can be plugged into
:class:`~stocksignals.textprep.PrepConfig` instead.
"""

from __future__ import annotations

import re
from typing import Callable, Sequence

Lemmatizer = Callable[[str], str]
Tagger = Callable[[Sequence[str]], list[tuple[str, str]]]

_IRREGULAR = {
    "children": "child", "men": "man", "women": "woman", "mice": "mouse", "feet": "foot",
    "teeth": "tooth", "went": "go", "gone": "go", "ran": "run", "sold": "sell", "bought": "buy",
    "fell": "fall", "fallen": "fall", "risen": "rise", "lost": "lose", "grew": "grow",
    "grown": "grow", "paid": "pay", "made": "make", "took": "take", "taken": "take",
}
_VOWEL = re.compile(r"[aeiouy]")
_KEEP_DOUBLE = set("lsz")


def _undouble(stem: str) -> str:
    if len(stem) > 2 and stem[-1] == stem[-2] and stem[-1] not in _KEEP_DOUBLE and not _VOWEL.match(stem[-1]):
        return stem[:-1]
    return stem


def suffix_lemma(word: str) -> str:
    """One round of suffix stripping for a lowercase word."""
    if not word.isalpha() or not word.islower():
        return word
    if word in _IRREGULAR:
        return _IRREGULAR[word]
    n = len(word)
    if word.endswith("ies") and n > 4:
        return word[:-3] + "y"
    if word.endswith("sses"):
        return word[:-2]
    if word.endswith("es") and n > 4 and word[:-2].endswith(("x", "z", "ch", "sh", "ss")):
        return word[:-2]
    if word.endswith("s") and n > 3 and not word.endswith(("ss", "us", "is", "ous")):
        return word[:-1]
    if word.endswith("ied") and n > 4:
        return word[:-3] + "y"
    for suf in ("ing", "ed"):
        if word.endswith(suf):
            stem = word[: -len(suf)]
            if len(stem) >= 3 and _VOWEL.search(stem):
                return _undouble(stem)
    return word


_ADVERBS = frozenset("""
very really quite too so rather extremely highly badly well fast hard soon never always often
sometimes already still just almost nearly only even not also again ever yet instead sharply
""".split())
_ADJECTIVES = frozenset("""
good bad great poor high low strong weak big small new old happy sad angry afraid glad sorry
bullish bearish positive negative huge tiny best worst better worse terrible awful excellent
nice fine great wonderful horrible scary calm nervous excited upset proud fearful hopeful
""".split())
_INTERJECTIONS = frozenset("""
wow oh ah ugh yay alas hooray ouch oops hmm yikes whoa phew damn yeah nope hey bravo meh
""".split())
_CLOSED = {
    "DET": frozenset("the a an this that these those each every some any no".split()),
    "PRON": frozenset("i me you he she it we they him her us them my your his its our their".split()),
    "ADP": frozenset("of in on at by for with about against between into through from to over under".split()),
    "CCONJ": frozenset("and or but nor yet".split()),
    "AUX": frozenset("is are was were be been being am have has had do does did will would can could should may might must".split()),
}
_ADJ_SUFFIX = ("ous", "ful", "ive", "able", "ible", "less", "ish", "ical", "ic", "est", "ary", "ant", "ent")


def rule_tag(tokens: Sequence[str]) -> list[tuple[str, str]]:
    """Tag tokens with universal POS labels (ADJ, ADV, INTJ, NOUN, VERB, ...)."""
    out = []
    for tok in tokens:
        w = tok.casefold()
        tag = None
        for label, words in _CLOSED.items():
            if w in words:
                tag = label
                break
        if tag is None:
            if w in _INTERJECTIONS:
                tag = "INTJ"
            elif w in _ADVERBS or (w.endswith("ly") and len(w) > 4):
                tag = "ADV"
            elif w in _ADJECTIVES or (w.endswith(_ADJ_SUFFIX) and len(w) > 5):
                tag = "ADJ"
            elif re.fullmatch(r"[\d.,%$]+", w):
                tag = "NUM"
            elif w.endswith(("ing", "ed")) and len(w) > 4:
                tag = "VERB"
            else:
                tag = "NOUN"
        out.append((tok, tag))
    return out
