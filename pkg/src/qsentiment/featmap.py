"""Pauli (Z, XX) feature-map circuits.

The encoded state is

    |f(x)> = ( exp(i sum_{j,k} f_jk(x) X_j X_k) exp(i sum_m f_m(x) Z_m) H^n )^r |0...0>

with ``f_m(x) = x[m]`` and ``f_jk(x) = (pi - x[j]) (pi - x[k])``.  With
``RZ(t) = exp(-i t Z / 2)`` a phase ``exp(i f Z)`` is ``RZ(-2 f)``; an
``exp(i f X_j X_k)`` factor is the CNOT-RZ-CNOT ZZ block conjugated by
Hadamards on both qubits.

Inputs are expected in ``[0, 2 pi]`` per feature; :class:`FeatureScaler`
produces that range from training data.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from itertools import combinations

import numpy as np

from . import qsim
from .errors import ConfigError, StructureError

ENTANGLEMENTS = ("linear", "full")
TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class FeatureMapConfig:
    n_qubits: int
    reps: int = 2
    entanglement: str = "linear"
    scale_low: float = 0.0
    scale_high: float = TWO_PI

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ConfigError(f"feature map needs n_qubits >= 1, got {self.n_qubits}")
        if self.reps < 1:
            raise ConfigError(f"feature map needs reps >= 1, got {self.reps}")
        if self.entanglement not in ENTANGLEMENTS:
            raise ConfigError(f"entanglement must be one of {ENTANGLEMENTS}, got {self.entanglement!r}")
        if not self.scale_high > self.scale_low:
            raise ConfigError("scale_high must exceed scale_low")

    def pairs(self) -> list[tuple[int, int]]:
        if self.entanglement == "linear":
            return [(q, q + 1) for q in range(self.n_qubits - 1)]
        return list(combinations(range(self.n_qubits), 2))

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


def data_map_single(x, m: int) -> float:
    if not 0 <= m < len(x):
        raise IndexError(f"qubit {m} out of range for {len(x)} features")
    return float(x[m])


def data_map_pair(x, j: int, k: int) -> float:
    if j == k:
        raise IndexError(f"pair map needs two distinct qubits, got ({j}, {k})")
    for q in (j, k):
        if not 0 <= q < len(x):
            raise IndexError(f"qubit {q} out of range for {len(x)} features")
    return (math.pi - float(x[j])) * (math.pi - float(x[k]))


def _check_width(n_features, cfg):
    if n_features != cfg.n_qubits:
        raise StructureError(f"{n_features} features do not fit a {cfg.n_qubits}-qubit feature map")


def build_feature_map(x, cfg: FeatureMapConfig) -> qsim.Circuit:
    x = np.asarray(x, dtype=np.float64)
    _check_width(x.shape[0], cfg)
    n = cfg.n_qubits
    circ = qsim.Circuit(n)
    for _ in range(cfg.reps):
        for q in range(n):
            circ.h(q)
        for q in range(n):
            circ.rz(q, -2.0 * data_map_single(x, q))
        for j, k in cfg.pairs():
            circ.h(j).h(k)
            circ.cnot(j, k)
            circ.rz(k, -2.0 * data_map_pair(x, j, k))
            circ.cnot(j, k)
            circ.h(j).h(k)
    return circ


def feature_angles(X, cfg: FeatureMapConfig) -> np.ndarray:
    """Angle matrix ``(B, G)`` matching the gate order of :func:`build_feature_map`."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    _check_width(X.shape[1], cfg)
    n = cfg.n_qubits
    pairs = cfg.pairs()
    # per repetition: n H, n RZ, then 7 gates per pair with the RZ fourth
    block = 2 * n + 7 * len(pairs)
    one = np.zeros((X.shape[0], block))
    one[:, n:2 * n] = -2.0 * X
    for p, (j, k) in enumerate(pairs):
        one[:, 2 * n + 7 * p + 3] = -2.0 * (math.pi - X[:, j]) * (math.pi - X[:, k])
    return np.tile(one, (1, cfg.reps))


def feature_states(X, cfg: FeatureMapConfig) -> np.ndarray:
    """Encoded states for every row of ``X``, shape ``(B, 2**n)``."""
    angles = feature_angles(X, cfg)
    template = build_feature_map(np.zeros(cfg.n_qubits), cfg)
    states = np.zeros((angles.shape[0], 2 ** cfg.n_qubits), dtype=np.complex128)
    states[:, 0] = 1.0
    return qsim.run_batch(template, states, angles)


def feature_state(x, cfg: FeatureMapConfig) -> np.ndarray:
    return qsim.run(build_feature_map(x, cfg))


class FeatureScaler:
    """Per-feature min-max scaling onto ``[low, high]``, fitted on training rows.

    Constant columns map to ``low``.  Values outside the fitted range are not
    clipped: the feature map's phases are periodic.
    """

    def __init__(self, low=0.0, high=TWO_PI):
        self.low = float(low)
        self.high = float(high)
        self.min_ = None
        self.max_ = None

    def fit(self, X):
        X = np.asarray(X, dtype=np.float64)
        self.min_ = X.min(axis=0)
        self.max_ = X.max(axis=0)
        return self

    def transform(self, X):
        if self.min_ is None:
            raise StructureError("scaler is not fitted")
        X = np.asarray(X, dtype=np.float64)
        span = self.max_ - self.min_
        safe = np.where(span > 0, span, 1.0)
        unit = np.where(span > 0, (X - self.min_) / safe, 0.0)
        return self.low + unit * (self.high - self.low)

    def fit_transform(self, X):
        return self.fit(X).transform(X)

    def to_dict(self):
        return {"low": self.low, "high": self.high, "min": self.min_.tolist(), "max": self.max_.tolist()}

    @classmethod
    def from_dict(cls, d):
        s = cls(d["low"], d["high"])
        s.min_ = np.asarray(d["min"], dtype=np.float64)
        s.max_ = np.asarray(d["max"], dtype=np.float64)
        return s
