"""Dataset ingestion and the stratified train/test split."""
from __future__ import annotations

import csv
import io
from importlib import resources
from typing import NamedTuple, Sequence

import numpy as np

from ..errors import DatasetError
from .config import BUILTIN_TOY


class LabeledDocument(NamedTuple):
    text: str
    label: str
    line: int  # 1-based line in the source file


def _decode(raw: bytes, source) -> str:
    try:
        return raw.decode("utf-8-sig")
    except UnicodeDecodeError:
        for lineno, line in enumerate(raw.split(b"\n"), start=1):
            try:
                line.decode("utf-8")
            except UnicodeDecodeError as exc:
                raise DatasetError(f"{source}: line {lineno} is not valid UTF-8 ({exc.reason})") from None
        raise


def parse_csv(text: str, source="<string>") -> list[LabeledDocument]:
    if not text.strip():
        raise DatasetError(f"{source}: file is empty")
    reader = csv.reader(io.StringIO(text, newline=""))
    try:
        header = next(reader)
    except csv.Error as exc:
        raise DatasetError(f"{source}: line 1: {exc}") from exc
    cols = [h.strip().lower() for h in header]
    missing = [c for c in ("text", "label") if c not in cols]
    if missing:
        raise DatasetError(f"{source}: line 1: header {header!r} lacks column(s) {missing}; expected 'text,label'")
    ti, li = cols.index("text"), cols.index("label")
    docs = []
    try:
        for row in reader:
            if not row or all(not c.strip() for c in row):
                continue
            line = reader.line_num
            if len(row) <= max(ti, li):
                raise DatasetError(f"{source}: line {line}: expected {len(cols)} fields, got {len(row)}")
            label = row[li].strip()
            if not label:
                raise DatasetError(f"{source}: line {line}: empty label")
            docs.append(LabeledDocument(row[ti], label, line))
    except csv.Error as exc:
        raise DatasetError(f"{source}: line {reader.line_num}: {exc}") from exc
    if not docs:
        raise DatasetError(f"{source}: no data rows after the header")
    return docs


def load_dataset(path, format="csv") -> list[LabeledDocument]:
    """Read a UTF-8 CSV with a ``text,label`` header (``builtin:toy`` loads the bundled set)."""
    if format != "csv":
        raise DatasetError(f"unsupported dataset format {format!r}")
    if str(path) == BUILTIN_TOY:
        raw = (resources.files("qsentiment") / "data" / "toy_sentiment.csv").read_bytes()
    else:
        try:
            with open(path, "rb") as fh:
                raw = fh.read()
        except OSError as exc:
            raise DatasetError(f"cannot read dataset {path}: {exc.strerror}") from exc
    return parse_csv(_decode(raw, path), source=path)


def train_test_split(labels: Sequence, ratio=0.8, seed=42):
    """Stratified, seeded split; returns ``(train_idx, test_idx)`` index arrays.

    Each class is shuffled and cut at ``round(ratio * n_class)``; both index
    arrays are then shuffled so classes interleave.
    """
    if not 0.0 < ratio < 1.0:
        raise DatasetError(f"split ratio must lie in (0, 1), got {ratio}")
    labels = np.asarray(labels)
    rng = np.random.default_rng(seed)
    train, test = [], []
    for cls in np.unique(labels):
        idx = np.flatnonzero(labels == cls)
        if idx.shape[0] < 2:
            raise DatasetError(f"class {cls!r} has {idx.shape[0]} row(s); a split needs at least 2")
        idx = rng.permutation(idx)
        cut = int(round(ratio * idx.shape[0]))
        if cut == 0 or cut == idx.shape[0]:
            raise DatasetError(f"ratio {ratio} leaves class {cls!r} ({idx.shape[0]} rows) absent from one side")
        train.append(idx[:cut])
        test.append(idx[cut:])
    return rng.permutation(np.concatenate(train)), rng.permutation(np.concatenate(test))
