"""Soft-margin SVM trained on the dual with sequential minimal optimisation.

Public labels are 0/1; the solver works with -1/+1 internally.  A model is
either ``linear`` (keeps its training rows and builds kernel rows itself) or
``precomputed`` (callers pass kernel rows against the training set).
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernels
from .errors import DatasetError, StructureError

log = logging.getLogger(__name__)

MODES = ("linear", "precomputed")


def linear_kernel(X1, X2):
    X1 = np.atleast_2d(np.asarray(X1, dtype=np.float64))
    X2 = np.atleast_2d(np.asarray(X2, dtype=np.float64))
    if X1.shape[1] != X2.shape[1]:
        raise StructureError(f"feature dimensions differ: {X1.shape[1]} vs {X2.shape[1]}")
    return X1 @ X2.T


def to_signed(y):
    y = np.asarray(y)
    values = set(np.unique(y).tolist())
    if values <= {0, 1}:
        return np.where(y == 1, 1.0, -1.0)
    if values <= {-1, 1}:
        return y.astype(np.float64)
    raise DatasetError(f"labels must be 0/1 or -1/+1, got {sorted(values)}")


def dual_objective(alpha, y_signed, K):
    """W(alpha) = sum(alpha) - 1/2 (alpha*y)^T K (alpha*y)."""
    ay = np.asarray(alpha) * np.asarray(y_signed)
    return float(np.sum(alpha) - 0.5 * ay @ K @ ay)


@dataclass
class SvmModel:
    alphas: np.ndarray
    bias: float
    y: np.ndarray  # training labels in -1/+1
    C: float
    mode: str = "precomputed"
    converged: bool = True
    sweeps: int = 0
    X: Optional[np.ndarray] = None  # training rows, linear mode only

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.alphas > 1e-12 * self.C)

    def to_dict(self):
        d = {
            "mode": self.mode,
            "C": self.C,
            "bias": self.bias,
            "alphas": self.alphas.tolist(),
            "y": self.y.astype(int).tolist(),
            "support": self.support.tolist(),
            "converged": self.converged,
            "sweeps": self.sweeps,
        }
        if self.X is not None:
            d["X"] = self.X.tolist()
        return d

    @classmethod
    def from_dict(cls, d):
        if d["mode"] not in MODES:
            raise StructureError(f"unknown SVM mode {d['mode']!r}")
        X = np.asarray(d["X"], dtype=np.float64) if d.get("X") is not None else None
        return cls(
            alphas=np.asarray(d["alphas"], dtype=np.float64),
            bias=float(d["bias"]),
            y=np.asarray(d["y"], dtype=np.float64),
            C=float(d["C"]),
            mode=d["mode"],
            converged=bool(d.get("converged", True)),
            sweeps=int(d.get("sweeps", 0)),
            X=X,
        )


def svm_train(K, y, C=1.0, tol=1e-3, max_passes=100, seed=0, eps=1e-8) -> SvmModel:
    """Train on a precomputed Gram matrix ``K``.

    ``max_passes`` caps the number of sweeps over the training set; a sweep
    in which no pair makes progress ends training as converged.  Otherwise
    the returned model has ``converged=False``.
    """
    K = np.ascontiguousarray(K, dtype=np.float64)
    ys = to_signed(y)
    n = ys.shape[0]
    if K.ndim != 2 or K.shape != (n, n):
        raise DatasetError(f"kernel matrix shape {K.shape} does not match {n} labels")
    if n < 2:
        raise DatasetError("need at least two training points")
    asym = np.abs(K - K.T).max()
    if asym > 1e-8:
        raise DatasetError(f"kernel matrix is not symmetric (max |K - K^T| = {asym:.3g})")
    if C <= 0:
        raise ValueError(f"C must be positive, got {C}")
    draws = np.random.default_rng(seed).random(max(1024, 4 * n))
    alpha, b, sweeps, converged = kernels.smo(K, ys, float(C), float(tol), int(max_passes), draws, float(eps))
    alpha = np.clip(alpha, 0.0, C)
    free = (alpha > eps * C) & (alpha < C * (1 - eps))
    if free.any():
        b = float(np.mean(ys[free] - K[free] @ (alpha * ys)))
    if not converged:
        log.warning("SMO stopped after %d sweeps without meeting tol=%g", sweeps, tol)
    return SvmModel(alpha, float(b), ys, float(C), "precomputed", bool(converged), int(sweeps))


def svm_train_linear(X, y, C=1.0, tol=1e-3, max_passes=100, seed=0, eps=1e-8) -> SvmModel:
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    model = svm_train(linear_kernel(X, X), y, C=C, tol=tol, max_passes=max_passes, seed=seed, eps=eps)
    model.mode = "linear"
    model.X = X.copy()
    return model


def svm_decision(model: SvmModel, k_rows=None, X=None) -> np.ndarray:
    """Decision values ``sum_i alpha_i y_i K(x_i, x) + b`` for each query.

    Precomputed models take ``k_rows`` shaped ``(m, n_train)`` or
    ``(m, n_support)``; linear models take feature rows ``X``.
    """
    if model.mode == "linear":
        if X is None or k_rows is not None:
            raise StructureError("a linear-mode model predicts from feature rows X")
        k_rows = linear_kernel(X, model.X)
    else:
        if k_rows is None or X is not None:
            raise StructureError("a precomputed-mode model predicts from kernel rows")
        k_rows = np.atleast_2d(np.asarray(k_rows, dtype=np.float64))
    coef = model.alphas * model.y
    if k_rows.shape[1] == coef.shape[0]:
        return k_rows @ coef + model.bias
    sv = model.support
    if k_rows.shape[1] == sv.shape[0]:
        return k_rows @ coef[sv] + model.bias
    raise StructureError(
        f"kernel rows have {k_rows.shape[1]} columns; expected {coef.shape[0]} (training set) or {sv.shape[0]} (support set)"
    )


def svm_predict(model: SvmModel, k_rows=None, X=None):
    """Return ``(labels in {0,1}, decision values)``; a decision of exactly 0 predicts 1."""
    d = svm_decision(model, k_rows=k_rows, X=X)
    return (d >= 0.0).astype(np.int64), d
