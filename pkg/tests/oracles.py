"""Reference computations that share no code with the package under test."""
import itertools
import math
from functools import reduce

import numpy as np
from scipy.linalg import expm

I2 = np.eye(2, dtype=complex)
X2 = np.array([[0, 1], [1, 0]], dtype=complex)
Y2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z2 = np.diag([1.0, -1.0]).astype(complex)
H2 = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)


def embed(n, ops):
    """Tensor product with ``ops[q]`` on qubit q; qubit 0 is the rightmost factor."""
    return reduce(np.kron, [ops.get(q, I2) for q in reversed(range(n))])


def ry(t):
    return expm(-0.5j * t * Y2)


def rz(t):
    return expm(-0.5j * t * Z2)


def cnot(n, control, target):
    dim = 2 ** n
    u = np.zeros((dim, dim), dtype=complex)
    for i in range(dim):
        j = i ^ (1 << target) if (i >> control) & 1 else i
        u[j, i] = 1.0
    return u


def gate_matrix(n, kind, target, control=None, angle=None):
    if kind == "CNOT":
        return cnot(n, control, target)
    single = {"H": H2, "X": X2}.get(kind)
    if single is None:
        single = ry(angle) if kind == "RY" else rz(angle)
    return embed(n, {target: single})


def circuit_matrix(n, gates):
    """Product of per-gate unitaries, first gate rightmost."""
    u = np.eye(2 ** n, dtype=complex)
    for g in gates:
        u = gate_matrix(n, *g) @ u
    return u


def pauli_feature_unitary(x, pairs, reps):
    """(exp(i sum f_jk X_j X_k) exp(i sum x_m Z_m) H^n)^r by matrix exponentiation."""
    n = len(x)
    hz = sum(x[m] * embed(n, {m: Z2}) for m in range(n))
    hxx = np.zeros_like(hz)
    for j, k in pairs:
        hxx = hxx + (math.pi - x[j]) * (math.pi - x[k]) * embed(n, {j: X2, k: X2})
    block = expm(1j * hxx) @ expm(1j * hz) @ embed(n, {q: H2 for q in range(n)})
    return np.linalg.matrix_power(block, reps)


def equal_up_to_phase(a, b):
    """max |a - e^{i phi} b| with phi chosen to align the two."""
    inner = np.vdot(b.ravel(), a.ravel())
    phase = inner / abs(inner) if abs(inner) > 0 else 1.0
    return float(np.abs(a - phase * b).max())


def parity_operator(n):
    return embed(n, {q: Z2 for q in range(n)})


def naive_linear_kernel(X1, X2_):
    out = np.zeros((len(X1), len(X2_)))
    for i in range(len(X1)):
        for j in range(len(X2_)):
            s = 0.0
            for d in range(len(X1[i])):
                s += X1[i][d] * X2_[j][d]
            out[i, j] = s
    return out


def brute_force_dual(K, y, C):
    """Maximise the SVM dual by enumerating which multipliers sit at 0, at C, or free.

    For every assignment, the free multipliers solve the KKT stationarity and
    equality conditions exactly (least squares); feasible candidates are
    scored and the best objective is returned.
    """
    n = len(y)
    Q = (y[:, None] * y[None, :]) * K
    best = -np.inf
    for pattern in itertools.product((0, 1, 2), repeat=n):
        alpha = np.array([0.0 if p == 0 else C if p == 1 else np.nan for p in pattern])
        free = np.isnan(alpha)
        fixed = ~free
        nf = int(free.sum())
        if nf == 0:
            if abs(y @ np.nan_to_num(alpha)) > 1e-9:
                continue
            cand = np.nan_to_num(alpha)
        else:
            a_fixed = np.where(fixed, alpha, 0.0)
            # [Q_FF  y_F] [a_F]   [1 - Q_FB a_B]
            # [y_F^T  0 ] [lam] = [  -y_B a_B  ]
            A = np.zeros((nf + 1, nf + 1))
            A[:nf, :nf] = Q[np.ix_(free, free)]
            A[:nf, nf] = y[free]
            A[nf, :nf] = y[free]
            rhs = np.concatenate([1.0 - Q[free] @ a_fixed, [-(y @ a_fixed)]])
            sol, *_ = np.linalg.lstsq(A, rhs, rcond=None)
            if np.abs(A @ sol - rhs).max() > 1e-8:
                continue
            af = sol[:nf]
            if (af < -1e-10).any() or (af > C + 1e-10).any():
                continue
            cand = a_fixed.copy()
            cand[free] = np.clip(af, 0.0, C)
        ay = cand * y
        best = max(best, cand.sum() - 0.5 * ay @ K @ ay)
    return best


def adam_reference(theta, grads, lr=0.01, b1=0.9, b2=0.999, eps=1e-8):
    """Scalar-loop ADAM over a fixed gradient sequence; returns every iterate."""
    theta = [float(v) for v in theta]
    m = [0.0] * len(theta)
    v = [0.0] * len(theta)
    out = []
    for t, g in enumerate(grads, start=1):
        for i in range(len(theta)):
            m[i] = b1 * m[i] + (1 - b1) * g[i]
            v[i] = b2 * v[i] + (1 - b2) * g[i] ** 2
            mh = m[i] / (1 - b1 ** t)
            vh = v[i] / (1 - b2 ** t)
            theta[i] -= lr * mh / (math.sqrt(vh) + eps)
        out.append(list(theta))
    return np.array(out)
