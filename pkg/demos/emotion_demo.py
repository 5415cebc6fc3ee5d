"""Emotion tf-idf for the bundled 12-document toy day.

    python demos/emotion_demo.py
"""

import datetime as dt
import json
from pathlib import Path

from stocksignals.emotion import EMOTIONS, EmotionLexicon, daily_emotion_vector

TOY = Path(__file__).resolve().parents[1] / "tests" / "fixtures" / "emotion_toy_day.json"


def main():
    toy = json.loads(TOY.read_text())
    lexicon = EmotionLexicon.from_emotions(toy["lexicon"])
    vec = daily_emotion_vector(toy["ticker"], dt.date.fromisoformat(toy["date"]), toy["documents"], lexicon)
    print(f"{vec.ticker} {vec.date}: {vec.doc_count} documents")
    for emo in EMOTIONS:
        # idf = ln(N / (1 + df)) turns negative once most documents carry the emotion
        print(f"  {emo:<13} etf={vec.etf_sum[emo]:>2}  df={vec.df[emo]:>2}  value={vec.values[emo]:+.4f}")


if __name__ == "__main__":
    main()
