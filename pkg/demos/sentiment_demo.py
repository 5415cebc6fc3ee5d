"""Preprocess headlines and score them with a small dictionary, negation included.

    python demos/sentiment_demo.py
"""

from stocksignals.lexsent import SentimentLexicon, classify_compound, score_document
from stocksignals.textprep import PrepConfig, preprocess

HEADLINES = [
    "The stock market is doing well",
    "The stock market is not doing well",
    "@Microsoft profits are booming, analysts see strong gains http://t.co/x",
    "Investors fear weak demand and losses",
]


def main():
    lexicon = SentimentLexicon.from_words(["well", "boom", "strong", "gain", "profit"],
                                          ["fear", "weak", "loss"], stem=True)
    cfg = PrepConfig(mode="lm")
    for text in HEADLINES:
        tokens = preprocess(text, cfg)
        s = score_document(tokens, lexicon)
        print(f"{s.label:>8}  polarity={s.polarity:+.3f}  subjectivity={s.subjectivity:+.3f}  {tokens}")

    # third-party compound scores map onto labels with closed +/-0.05 bounds
    print([classify_compound(v) for v in (0.05, 0.0, -0.05)])


if __name__ == "__main__":
    main()
