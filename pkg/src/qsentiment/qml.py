"""Quantum kernels and the variational quantum classifier.

The kernel entry for two inputs is the fidelity of their encoded states,
``|<f(a)|f(b)>|**2``.  The classifier appends a real-amplitudes ansatz to the
feature map, reads out the Z-parity expectation ``e`` and predicts 1 when
``e >= threshold``.  Training minimises the mean squared error between ``e``
and targets -1/+1 with ADAM; gradients come from the parameter-shift rule.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from . import kernels, qsim
from .errors import DatasetError, StructureError
from .featmap import FeatureMapConfig, feature_states


def quantum_kernel_matrix(X1, X2=None, cfg: FeatureMapConfig = None, shots: Optional[int] = None, seed: int = 0):
    """Fidelity Gram matrix between the rows of ``X1`` and ``X2``.

    With ``X2=None`` the square, symmetric training Gram matrix is returned:
    only the upper triangle is evaluated and the diagonal is exactly 1.
    ``shots`` replaces each exact fidelity by the frequency of the all-zero
    outcome of a compute-uncompute circuit, i.e. ``Binomial(shots, K)/shots``.
    """
    if cfg is None:
        raise StructureError("a FeatureMapConfig is required")
    X1 = np.atleast_2d(np.asarray(X1, dtype=np.float64))
    symmetric = X2 is None
    s1 = feature_states(X1, cfg)
    s2 = s1 if symmetric else feature_states(np.atleast_2d(np.asarray(X2, dtype=np.float64)), cfg)
    k = kernels.fidelity_matrix(s1, s2, symmetric)
    np.clip(k, 0.0, 1.0, out=k)
    if shots is not None:
        if shots < 1:
            raise ValueError(f"shots must be >= 1, got {shots}")
        rng = np.random.default_rng(seed)
        sampled = rng.binomial(shots, k) / shots
        if symmetric:
            sampled = np.triu(sampled, 1)
            sampled = sampled + sampled.T
            np.fill_diagonal(sampled, 1.0)
        k = sampled
    return k


def save_kernel_csv(k, path):
    """Write a kernel matrix as plain CSV, one row per line, full float precision."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        for row in np.asarray(k):
            w.writerow([repr(float(v)) for v in row])


def load_kernel_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return np.array([[float(v) for v in row] for row in csv.reader(fh)])


# --- ansatz -----------------------------------------------------------------

def n_ansatz_params(n_qubits: int, layers: int) -> int:
    return n_qubits * (layers + 1)


def build_real_amplitudes(n_qubits: int, layers: int, theta) -> qsim.Circuit:
    """RY column, then ``layers`` x (CNOT chain 0->1->...->n-1, RY column)."""
    theta = np.asarray(theta, dtype=np.float64).ravel()
    if theta.shape[0] != n_ansatz_params(n_qubits, layers):
        raise StructureError(
            f"real-amplitudes ansatz with {n_qubits} qubits and {layers} layers takes "
            f"{n_ansatz_params(n_qubits, layers)} angles, got {theta.shape[0]}"
        )
    circ = qsim.Circuit(n_qubits)
    for q in range(n_qubits):
        circ.ry(q, theta[q])
    for layer in range(1, layers + 1):
        for q in range(n_qubits - 1):
            circ.cnot(q, q + 1)
        for q in range(n_qubits):
            circ.ry(q, theta[layer * n_qubits + q])
    return circ


class _Ansatz:
    """Gate structure of the ansatz plus the slots its angles occupy."""

    def __init__(self, n_qubits, layers):
        self.n_params = n_ansatz_params(n_qubits, layers)
        self.circuit = build_real_amplitudes(n_qubits, layers, np.zeros(self.n_params))
        self.slots = np.array([i for i, op in enumerate(self.circuit) if op.kind == "RY"])

    def angles(self, thetas):
        thetas = np.atleast_2d(thetas)
        out = np.zeros((thetas.shape[0], len(self.circuit)))
        out[:, self.slots] = thetas
        return out

    def expectations(self, states, thetas):
        """Parity expectations, shape ``(len(thetas), len(states))``."""
        thetas = np.atleast_2d(thetas)
        v, b = thetas.shape[0], states.shape[0]
        batch = np.tile(states, (v, 1))
        angles = np.repeat(self.angles(thetas), b, axis=0)
        out = qsim.run_batch(self.circuit, batch, angles)
        return kernels.parity_expectation(out).reshape(v, b)


# --- model ------------------------------------------------------------------

@dataclass
class VqcModel:
    theta: np.ndarray
    feature_map: FeatureMapConfig
    layers: int = 3
    threshold: float = 0.0
    loss_history: list = field(default_factory=list)

    def __post_init__(self):
        self.theta = np.asarray(self.theta, dtype=np.float64).ravel()
        expected = n_ansatz_params(self.feature_map.n_qubits, self.layers)
        if self.theta.shape[0] != expected:
            raise StructureError(f"model needs {expected} angles, got {self.theta.shape[0]}")

    @property
    def n_qubits(self):
        return self.feature_map.n_qubits

    @property
    def best_so_far(self):
        return np.minimum.accumulate(self.loss_history) if self.loss_history else np.array([])

    def with_theta(self, theta):
        return VqcModel(theta, self.feature_map, self.layers, self.threshold, list(self.loss_history))

    def to_dict(self):
        return {
            "theta": self.theta.tolist(),
            "feature_map": self.feature_map.to_dict(),
            "layers": self.layers,
            "threshold": self.threshold,
            "loss_history": [float(v) for v in self.loss_history],
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            theta=d["theta"],
            feature_map=FeatureMapConfig.from_dict(d["feature_map"]),
            layers=d["layers"],
            threshold=d["threshold"],
            loss_history=list(d["loss_history"]),
        )


def _targets(y):
    y = np.asarray(y)
    if not np.isin(y, (0, 1)).all():
        raise DatasetError("VQC labels must be 0 or 1")
    return 2.0 * y - 1.0


def _batch(X, model):
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[0] == 0:
        raise DatasetError("empty batch")
    return X


def vqc_expectations(X, model: VqcModel, states=None):
    """Parity expectation for every row of ``X``."""
    if states is None:
        states = feature_states(_batch(X, model), model.feature_map)
    return _Ansatz(model.n_qubits, model.layers).expectations(states, model.theta)[0]


def vqc_forward(x, model: VqcModel, shots: Optional[int] = None, seed: int = 0) -> float:
    """Parity expectation for one input; ``shots`` estimates it from sampled bitstrings."""
    e = float(vqc_expectations(np.asarray(x, dtype=np.float64)[None, :], model)[0])
    if shots is None:
        return e
    psi = qsim.run(build_real_amplitudes(model.n_qubits, model.layers, model.theta),
                   feature_states(np.asarray(x, dtype=np.float64)[None, :], model.feature_map)[0])
    counts = qsim.measure_counts(psi, shots, seed)
    return sum((-1) ** key.count("1") * c for key, c in counts.items()) / shots


def vqc_loss(X, y, model: VqcModel, states=None) -> float:
    X = _batch(X, model)
    e = vqc_expectations(X, model, states)
    return float(np.mean((e - _targets(y)) ** 2))


def _loss_and_grad(ansatz, states, t, theta):
    p = theta.shape[0]
    shifted = np.tile(theta, (2 * p + 1, 1))
    shifted[1 : p + 1][np.diag_indices(p)] += math.pi / 2
    shifted[p + 1 :][np.diag_indices(p)] -= math.pi / 2
    e = ansatz.expectations(states, shifted)
    resid = e[0] - t
    de = 0.5 * (e[1 : p + 1] - e[p + 1 :])
    loss = float(np.mean(resid ** 2))
    grad = 2.0 * (de @ resid) / t.shape[0]
    return loss, grad


def vqc_gradient(X, y, model: VqcModel, states=None) -> np.ndarray:
    """d(loss)/d(theta) by the parameter-shift rule, chained through the squared error."""
    X = _batch(X, model)
    if states is None:
        states = feature_states(X, model.feature_map)
    ansatz = _Ansatz(model.n_qubits, model.layers)
    return _loss_and_grad(ansatz, states, _targets(y), model.theta)[1]


def vqc_predict(x, model: VqcModel) -> int:
    return int(vqc_forward(x, model) >= model.threshold)


def vqc_predict_batch(X, model: VqcModel) -> np.ndarray:
    return (vqc_expectations(X, model) >= model.threshold).astype(np.int64)


# --- optimiser --------------------------------------------------------------

class AdamState(NamedTuple):
    m: np.ndarray
    v: np.ndarray
    t: int

    @classmethod
    def zeros(cls, size):
        return cls(np.zeros(size), np.zeros(size), 0)


def adam_step(theta, grad, state: AdamState, lr=0.01, beta1=0.9, beta2=0.999, eps=1e-8):
    """One bias-corrected ADAM update; returns ``(theta, state)`` without mutating inputs."""
    theta = np.asarray(theta, dtype=np.float64)
    grad = np.asarray(grad, dtype=np.float64)
    if not (theta.shape == grad.shape == state.m.shape == state.v.shape):
        raise ValueError(f"shape mismatch: theta {theta.shape}, grad {grad.shape}, moments {state.m.shape}")
    t = state.t + 1
    m = beta1 * state.m + (1.0 - beta1) * grad
    v = beta2 * state.v + (1.0 - beta2) * grad * grad
    m_hat = m / (1.0 - beta1 ** t)
    v_hat = v / (1.0 - beta2 ** t)
    return theta - lr * m_hat / (np.sqrt(v_hat) + eps), AdamState(m, v, t)


def vqc_train(X, y, cfg: FeatureMapConfig, layers=3, iterations=100, seed=0,
              lr=0.01, threshold=0.0, callback=None) -> VqcModel:
    """Full-batch ADAM from ``theta0 ~ U[-pi, pi]`` (seeded).

    ``loss_history[t]`` is the loss at the t-th iterate; the returned model
    carries the iterate with the lowest recorded loss (``theta0`` when
    ``iterations == 0``).
    """
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[0] == 0:
        raise DatasetError("empty training set")
    t = _targets(y)
    if t.shape[0] != X.shape[0]:
        raise DatasetError(f"{X.shape[0]} samples but {t.shape[0]} labels")
    rng = np.random.default_rng(seed)
    theta = rng.uniform(-math.pi, math.pi, n_ansatz_params(cfg.n_qubits, layers))
    states = feature_states(X, cfg)
    ansatz = _Ansatz(cfg.n_qubits, layers)
    state = AdamState.zeros(theta.shape[0])
    history = []
    best_theta, best_loss = theta.copy(), math.inf
    for it in range(iterations):
        loss, grad = _loss_and_grad(ansatz, states, t, theta)
        history.append(loss)
        if loss < best_loss:
            best_theta, best_loss = theta.copy(), loss
        if callback is not None:
            callback(it, loss)
        theta, state = adam_step(theta, grad, state, lr=lr)
    return VqcModel(best_theta, cfg, layers, threshold, history)
