"""Vectorised numpy implementations of the hot kernels.

Every function here has a twin with the same signature in ``_numba``.
States are stored as ``(batch, 2**n)`` complex arrays, qubit 0 being the
least significant bit of the basis index.
"""
import numpy as np

from .codes import CNOT, H, RY, RZ, X

_INV_SQRT2 = 1.0 / np.sqrt(2.0)


def _gate_matrices(kind, angles):
    """Return ``(B, 2, 2)`` matrices for a one-qubit gate, one per batch row."""
    b = angles.shape[0]
    m = np.zeros((b, 2, 2), dtype=np.complex128)
    if kind == H:
        m[:] = np.array([[1.0, 1.0], [1.0, -1.0]]) * _INV_SQRT2
    elif kind == X:
        m[:] = np.array([[0.0, 1.0], [1.0, 0.0]])
    elif kind == RY:
        c = np.cos(angles / 2.0)
        s = np.sin(angles / 2.0)
        m[:, 0, 0] = c
        m[:, 0, 1] = -s
        m[:, 1, 0] = s
        m[:, 1, 1] = c
    elif kind == RZ:
        m[:, 0, 0] = np.exp(-0.5j * angles)
        m[:, 1, 1] = np.exp(0.5j * angles)
    else:
        raise ValueError(f"unknown one-qubit gate code {kind}")
    return m


def apply_one_qubit(states, matrices, target):
    """Apply per-row 2x2 ``matrices`` (B, 2, 2) on ``target`` in place."""
    b, dim = states.shape
    low = 1 << target
    view = states.reshape(b, dim // (2 * low), 2, low)
    a0 = view[:, :, 0, :].copy()
    a1 = view[:, :, 1, :]
    m = matrices[:, :, :, None, None]
    view[:, :, 0, :] = m[:, 0, 0] * a0 + m[:, 0, 1] * a1
    view[:, :, 1, :] = m[:, 1, 0] * a0 + m[:, 1, 1] * a1
    return states


def apply_cnot(states, control, target):
    """Flip ``target`` where ``control`` is set, in place."""
    dim = states.shape[1]
    idx = np.arange(dim)
    src = idx[((idx >> control) & 1 == 1) & ((idx >> target) & 1 == 0)]
    dst = src | (1 << target)
    tmp = states[:, src].copy()
    states[:, src] = states[:, dst]
    states[:, dst] = tmp
    return states


def simulate(kinds, targets, controls, angles, states):
    """Run one gate sequence over a batch of states, in place.

    ``angles`` is ``(A, G)`` with ``A`` either 1 (shared by all rows) or the
    batch size (one angle set per row).
    """
    b = states.shape[0]
    for g in range(kinds.shape[0]):
        kind = kinds[g]
        if kind == CNOT:
            apply_cnot(states, controls[g], targets[g])
            continue
        col = angles[:, g]
        if col.shape[0] != b:
            col = np.broadcast_to(col, (b,))
        apply_one_qubit(states, _gate_matrices(kind, col), targets[g])
    return states


def parity_expectation(states):
    """Expectation of Z on every qubit, one value per row."""
    dim = states.shape[1]
    idx = np.arange(dim)
    parity = np.zeros(dim, dtype=np.int64)
    while idx.any():
        parity ^= idx & 1
        idx = idx >> 1
    signs = 1.0 - 2.0 * parity
    probs = states.real ** 2 + states.imag ** 2
    return probs @ signs


def fidelity_matrix(states1, states2, symmetric):
    overlaps = states1.conj() @ states2.T
    k = overlaps.real ** 2 + overlaps.imag ** 2
    if symmetric:
        k = np.triu(k)
        k = k + np.triu(k, 1).T
        np.fill_diagonal(k, 1.0)
    return k


def _take_step(i, j, alpha, y, kmat, errors, b, c, eps):
    if i == j:
        return False, b
    ai, aj = alpha[i], alpha[j]
    yi, yj = y[i], y[j]
    ei, ej = errors[i], errors[j]
    s = yi * yj
    if yi != yj:
        lo = max(0.0, aj - ai)
        hi = min(c, c + aj - ai)
    else:
        lo = max(0.0, ai + aj - c)
        hi = min(c, ai + aj)
    if hi - lo < eps:
        return False, b
    kii, kjj, kij = kmat[i, i], kmat[j, j], kmat[i, j]
    eta = 2.0 * kij - kii - kjj
    if eta < -eps:
        aj_new = aj - yj * (ei - ej) / eta
        aj_new = min(max(aj_new, lo), hi)
    else:
        # Degenerate curvature: pick whichever end of the segment is better.
        fi = yi * (ei - b) - ai * kii - s * aj * kij
        fj = yj * (ej - b) - s * ai * kij - aj * kjj
        li = ai + s * (aj - lo)
        hi_i = ai + s * (aj - hi)
        obj_lo = li * fi + lo * fj + 0.5 * li * li * kii + 0.5 * lo * lo * kjj + s * lo * li * kij
        obj_hi = hi_i * fi + hi * fj + 0.5 * hi_i * hi_i * kii + 0.5 * hi * hi * kjj + s * hi * hi_i * kij
        if obj_lo < obj_hi - eps:
            aj_new = lo
        elif obj_lo > obj_hi + eps:
            aj_new = hi
        else:
            return False, b
    if abs(aj_new - aj) < eps * (aj_new + aj + eps):
        return False, b
    ai_new = ai + s * (aj - aj_new)
    if ai_new < 0.0:
        ai_new = 0.0
    elif ai_new > c:
        ai_new = c
    dai = ai_new - ai
    daj = aj_new - aj
    b1 = b - ei - yi * dai * kii - yj * daj * kij
    b2 = b - ej - yi * dai * kij - yj * daj * kjj
    if 0.0 < ai_new < c:
        b_new = b1
    elif 0.0 < aj_new < c:
        b_new = b2
    else:
        b_new = 0.5 * (b1 + b2)
    errors += yi * dai * kmat[i] + yj * daj * kmat[j] + (b_new - b)
    alpha[i] = ai_new
    alpha[j] = aj_new
    return True, b_new


def smo(kmat, y, c, tol, max_passes, draws, eps):
    """Pairwise coordinate ascent on the soft-margin SVM dual.

    Full sweeps over all points alternate with passes over the non-bound
    points (``0 < alpha < C``) until those stop changing.  ``max_passes``
    caps the full sweeps; a full sweep without any update means every KKT
    condition holds within ``tol``.  ``draws`` is a buffer of uniform [0, 1)
    numbers consumed cyclically to pick the first second-index candidate; the
    remaining candidates are scanned in order from there.

    Returns ``(alpha, bias, sweeps, converged)``.
    """
    n = y.shape[0]
    alpha = np.zeros(n)
    errors = -y.astype(np.float64)
    b = 0.0
    ptr = 0
    sweeps = 0
    converged = False
    full = True
    inner = 0
    while sweeps < max_passes:
        if full:
            sweeps += 1
        else:
            inner += 1
        changed = 0
        for i in range(n):
            if not full and (alpha[i] <= 0.0 or alpha[i] >= c):
                continue
            r = y[i] * errors[i]
            if (r < -tol and alpha[i] < c) or (r > tol and alpha[i] > 0.0):
                start = int(draws[ptr] * (n - 1))
                ptr = (ptr + 1) % draws.shape[0]
                for k in range(n - 1):
                    j = (i + 1 + (start + k) % (n - 1)) % n
                    ok, b = _take_step(i, j, alpha, y, kmat, errors, b, c, eps)
                    if ok:
                        changed += 1
                        break
        if full:
            if changed == 0:
                converged = True
                break
            full = False
            inner = 0
        elif changed == 0 or inner >= n:
            full = True
    return alpha, b, sweeps, converged
