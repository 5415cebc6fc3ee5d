"""Combine Financial PhraseBank and FiQA task 1 into labelled train/test/validation CSVs."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from ..lexsent.scoring import LABELS, discretize_regression_label

TEST_FRACTION = 0.2
VALIDATION_FRACTION = 427 / 5328
SPLITS = ("train", "test", "validation")


class BenchmarkSourceError(FileNotFoundError):
    pass


@dataclass(frozen=True)
class LabelledText:
    text: str
    label: str
    origin: str


def read_phrasebank(path: str | Path) -> list[LabelledText]:
    """``Sentences_66Agree.txt``: one ``sentence@label`` per line, latin-1."""
    path = Path(path)
    if not path.is_file():
        raise BenchmarkSourceError(
            f"{path}: Financial PhraseBank file not found; expected Sentences_66Agree.txt "
            "with one 'sentence@negative|neutral|positive' per line (latin-1)")
    rows = []
    for lineno, line in enumerate(path.read_text(encoding="latin-1").splitlines(), start=1):
        if not line.strip():
            continue
        text, sep, label = line.rpartition("@")
        label = label.strip().lower()
        if not sep or label not in LABELS:
            raise ValueError(f"{path}:{lineno}: expected 'sentence@label'")
        rows.append(LabelledText(text.strip(), label, "phrasebank"))
    return rows


def read_fiqa(paths: str | Path | Sequence[str | Path]) -> list[LabelledText]:
    """FiQA task 1 JSON (``{id: {"sentence", "info": [{"sentiment_score", ...}]}}``).

    Scores are discretised with the +/-0.15 closed-interval thresholds; when
    a sentence has several aspects the first one's score is used.
    """
    if isinstance(paths, (str, Path)):
        paths = [paths]
    rows = []
    for path in map(Path, paths):
        if not path.is_file():
            raise BenchmarkSourceError(
                f"{path}: FiQA file not found; expected task1 JSON of the form "
                '{"<id>": {"sentence": ..., "info": [{"sentiment_score": ...}]}}')
        data = json.loads(path.read_text(encoding="utf-8"))
        for key in data:
            rec = data[key]
            try:
                score = float(rec["info"][0]["sentiment_score"])
            except (KeyError, IndexError, TypeError, ValueError):
                raise ValueError(f"{path}: entry {key!r} lacks info[0].sentiment_score") from None
            rows.append(LabelledText(str(rec["sentence"]).strip(), discretize_regression_label(score), "fiqa"))
    return rows


def largest_remainder(counts: Sequence[int], fraction: float) -> list[int]:
    """Per-group allocations summing to ``round(fraction * total)``."""
    total = round(fraction * sum(counts))
    quotas = [c * fraction for c in counts]
    alloc = [int(q) for q in quotas]
    order = sorted(range(len(counts)), key=lambda i: (-(quotas[i] - alloc[i]), i))
    for i in order[: total - sum(alloc)]:
        alloc[i] += 1
    return alloc


def stratified_split(rows: Sequence[LabelledText], seed: int,
                     test_fraction: float = TEST_FRACTION,
                     validation_fraction: float = VALIDATION_FRACTION) -> dict[str, list[LabelledText]]:
    rng = np.random.default_rng(seed)
    groups = {lab: [i for i, r in enumerate(rows) if r.label == lab] for lab in LABELS}
    sizes = [len(groups[lab]) for lab in LABELS]
    n_test = largest_remainder(sizes, test_fraction)
    n_val = largest_remainder(sizes, validation_fraction)
    assign: dict[int, str] = {}
    for lab, nt, nv in zip(LABELS, n_test, n_val):
        idx = np.array(groups[lab], dtype=int)
        perm = idx[rng.permutation(len(idx))]
        for i in perm[:nt]:
            assign[int(i)] = "test"
        for i in perm[nt:nt + nv]:
            assign[int(i)] = "validation"
        for i in perm[nt + nv:]:
            assign[int(i)] = "train"
    out = {s: [] for s in SPLITS}
    for i, r in enumerate(rows):
        out[assign[i]].append(r)
    return out


def prepare_benchmark(phrasebank: str | Path, fiqa, out_dir: str | Path, seed: int = 0) -> dict[str, Path]:
    """Write ``train.csv``, ``test.csv`` and ``validation.csv`` (text,label,origin)."""
    rows = read_phrasebank(phrasebank) + read_fiqa(fiqa)
    splits = stratified_split(rows, seed)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {}
    for name, part in splits.items():
        path = out_dir / f"{name}.csv"
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["text", "label", "origin"])
            w.writerows((r.text, r.label, r.origin) for r in part)
        paths[name] = path
    return paths
