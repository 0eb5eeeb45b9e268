"""Regenerate src/qsentiment/data/toy_sentiment.csv (64 two-class documents).

Positive and negative documents draw their opinion words from disjoint pools
and share the same neutral vocabulary, so the classes are linearly separable
in count space.  Stop words, punctuation, digits, mentions and URLs are mixed
in to exercise the cleaning rules.
"""
import csv
import random
from pathlib import Path

POSITIVE = ["great", "excellent", "wonderful", "amazing", "loved", "fantastic", "enjoyable", "brilliant", "delightful", "superb"]
NEGATIVE = ["terrible", "awful", "boring", "horrible", "hated", "dreadful", "disappointing", "poor", "worst", "dull"]
NEUTRAL = ["movie", "film", "plot", "actors", "story", "scenes", "ending", "music", "director", "cast"]
NOISE = ["the", "was", "is", "a", "really", "this", "@critic", "http://t.co/x1", "10/10", "!!", "2023", "..."]

OUT = Path(__file__).resolve().parents[1] / "src" / "qsentiment" / "data" / "toy_sentiment.csv"


def make_doc(rng, pool):
    words = rng.sample(pool, rng.randint(2, 3)) + rng.sample(NEUTRAL, rng.randint(1, 3)) + rng.sample(NOISE, rng.randint(1, 3))
    rng.shuffle(words)
    return " ".join(words)


def main():
    rng = random.Random(2024)
    rows = [(make_doc(rng, POSITIVE), "positive") for _ in range(32)]
    rows += [(make_doc(rng, NEGATIVE), "negative") for _ in range(32)]
    rng.shuffle(rows)
    with open(OUT, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["text", "label"])
        w.writerows(rows)


if __name__ == "__main__":
    main()
