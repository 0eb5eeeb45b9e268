"""Feature reduction with PCA and sample reduction with the 1-D Haar transform.

Haar levels use the averaging form: ``a = (x[2i] + x[2i+1]) / 2`` and
``d = (x[2i] - x[2i+1]) / 2``, so ``x[2i] = a + d`` and ``x[2i+1] = a - d``.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass

import numpy as np

from .errors import DatasetError, StructureError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class PcaModel:
    mean: np.ndarray
    components: np.ndarray  # (k, M), orthonormal rows
    explained_variance: np.ndarray

    @property
    def n_components(self):
        return self.components.shape[0]

    @property
    def n_features(self):
        return self.components.shape[1]

    def to_dict(self):
        return {
            "type": "pca",
            "mean": self.mean.tolist(),
            "components": self.components.tolist(),
            "explained_variance": self.explained_variance.tolist(),
        }

    @classmethod
    def from_dict(cls, d):
        if d.get("type") != "pca":
            raise StructureError("not a serialized PCA model")
        comps = np.asarray(d["components"], dtype=np.float64).reshape(len(d["components"]), -1)
        return cls(np.asarray(d["mean"], dtype=np.float64), comps, np.asarray(d["explained_variance"], dtype=np.float64))


def pca_fit(X, n_components=None) -> PcaModel:
    """Principal axes of ``X`` from the SVD of the mean-centred data.

    Each component is signed so that its largest-magnitude entry is positive.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 2:
        raise DatasetError("PCA needs a 2-D matrix with at least two rows")
    if not np.isfinite(X).all():
        raise DatasetError("PCA input contains non-finite values")
    mean = X.mean(axis=0)
    centred = X - mean
    _, s, vt = np.linalg.svd(centred, full_matrices=False)
    if s.size == 0 or s[0] <= 1e-12 * max(1.0, np.abs(X).max()):
        raise DatasetError("no variance: every row is identical")
    pivot = np.abs(vt).argmax(axis=1)
    signs = np.sign(vt[np.arange(vt.shape[0]), pivot])
    vt = vt * signs[:, None]
    var = s ** 2 / (X.shape[0] - 1)
    k = vt.shape[0] if n_components is None else int(n_components)
    if not 1 <= k <= vt.shape[0]:
        raise ValueError(f"n_components must be in [1, {vt.shape[0]}], got {k}")
    return PcaModel(mean, vt[:k].copy(), var[:k].copy())


def pca_transform(model: PcaModel, X, k=None) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    k = model.n_components if k is None else int(k)
    if not 1 <= k <= model.n_components:
        raise ValueError(f"k={k} but the model has {model.n_components} components")
    if X.shape[1] != model.n_features:
        raise StructureError(f"X has {X.shape[1]} columns, model expects {model.n_features}")
    return (X - model.mean) @ model.components[:k].T


@dataclass(frozen=True)
class HaarDecomposition:
    approximation: np.ndarray
    details: tuple  # finest first: lengths N/2, N/4, ..., N/2**l

    @property
    def levels(self):
        return len(self.details)

    def to_dict(self):
        return {
            "type": "haar",
            "levels": self.levels,
            "approximation": self.approximation.tolist(),
            "details": [d.tolist() for d in self.details],
        }

    @classmethod
    def from_dict(cls, d):
        if d.get("type") != "haar":
            raise StructureError("not a serialized Haar decomposition")
        dec = cls(np.asarray(d["approximation"], dtype=np.float64),
                  tuple(np.asarray(v, dtype=np.float64) for v in d["details"]))
        if dec.levels != d["levels"]:
            raise StructureError(f"declared {d['levels']} levels, found {dec.levels}")
        return dec

    def to_json(self):
        return json.dumps(self.to_dict())


def haar_forward(signal, levels: int) -> HaarDecomposition:
    x = np.asarray(signal, dtype=np.float64).ravel()
    if levels < 1:
        raise ValueError(f"levels must be >= 1, got {levels}")
    if x.shape[0] == 0 or x.shape[0] % (1 << levels):
        raise StructureError(
            f"length {x.shape[0]} is not divisible by 2**{levels}; truncate to "
            f"{x.shape[0] - x.shape[0] % (1 << levels)} samples or pad to the next multiple"
        )
    details = []
    for _ in range(levels):
        even, odd = x[0::2], x[1::2]
        details.append((even - odd) / 2.0)
        x = (even + odd) / 2.0
    return HaarDecomposition(x, tuple(details))


def haar_inverse(dec: HaarDecomposition) -> np.ndarray:
    a = np.asarray(dec.approximation, dtype=np.float64)
    for d in reversed(dec.details):
        d = np.asarray(d, dtype=np.float64)
        if d.shape != a.shape:
            raise StructureError(f"detail of length {d.shape[0]} cannot pair with approximation of length {a.shape[0]}")
        out = np.empty(2 * a.shape[0])
        out[0::2] = a + d
        out[1::2] = a - d
        a = out
    return a


def haar_compress_dataset(X, y, levels: int):
    """Keep the level-``levels`` Haar approximation of every feature column, per class.

    Rows of each class (in their given order) are truncated to a multiple of
    ``2**levels``; the output lists class 0 rows, then class 1 rows.
    """
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    y = np.asarray(y)
    if X.shape[0] != y.shape[0]:
        raise DatasetError(f"{X.shape[0]} rows but {y.shape[0]} labels")
    if levels == 0:
        return X.copy(), y.copy()
    if levels < 0:
        raise ValueError(f"levels must be >= 0, got {levels}")
    block = 1 << levels
    xs, ys = [], []
    for label in np.unique(y):
        rows = X[y == label]
        keep = rows.shape[0] - rows.shape[0] % block
        if keep == 0:
            raise DatasetError(f"over-compressed: class {label} has {rows.shape[0]} rows, fewer than 2**{levels}")
        if keep < rows.shape[0]:
            log.info("class %s: dropped %d trailing rows before %d-level Haar", label, rows.shape[0] - keep, levels)
        rows = rows[:keep]
        approx = np.column_stack([haar_forward(rows[:, j], levels).approximation for j in range(X.shape[1])])
        xs.append(approx)
        ys.append(np.full(approx.shape[0], label, dtype=y.dtype))
    return np.vstack(xs), np.concatenate(ys)


def haar_compressed_rows(class_counts, levels: int) -> int:
    """Row count after :func:`haar_compress_dataset` for the given class sizes."""
    block = 1 << levels
    return sum(n // block for n in class_counts)
