"""Classification metrics and the per-experiment report record."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from ..errors import DatasetError


@dataclass(frozen=True)
class SplitMetrics:
    """Binary metrics with class 1 as the positive class.

    Zero denominators give 0: precision with no positive predictions, recall
    with no positive truths, F1 when precision + recall is 0.
    """

    accuracy: float
    precision: float
    recall: float
    f1: float
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self):
        return self.tp + self.fp + self.tn + self.fn


def compute_metrics(y_true, y_pred) -> SplitMetrics:
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    if y_true.shape != y_pred.shape:
        raise DatasetError(f"length mismatch: {y_true.shape[0]} truths vs {y_pred.shape[0]} predictions")
    if y_true.size == 0:
        raise DatasetError("cannot score an empty split")
    for name, arr in (("y_true", y_true), ("y_pred", y_pred)):
        if not np.isin(arr, (0, 1)).all():
            raise DatasetError(f"{name} must contain only 0/1 labels")
    tp = int(np.sum((y_true == 1) & (y_pred == 1)))
    fp = int(np.sum((y_true == 0) & (y_pred == 1)))
    tn = int(np.sum((y_true == 0) & (y_pred == 0)))
    fn = int(np.sum((y_true == 1) & (y_pred == 0)))
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return SplitMetrics((tp + tn) / y_true.size, precision, recall, f1, tp, fp, tn, fn)


@dataclass
class MetricsReport:
    method: str
    pca_k: Optional[int]
    haar_levels: int
    train: SplitMetrics
    test: SplitMetrics
    train_time_s: float
    n_train: int  # rows the classifier was fitted on (after Haar compression)
    n_test: int
    converged: bool = True
    discarded: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        d["train"] = SplitMetrics(**d["train"])
        d["test"] = SplitMetrics(**d["test"])
        return cls(**d)
