"""Loop-level kernels compiled with numba; same signatures as ``_numpy``."""
import math

import numba as nb
import numpy as np

from .codes import CNOT, H, RY, RZ, X

_INV_SQRT2 = 1.0 / math.sqrt(2.0)
_opts = dict(cache=True, nogil=True)


@nb.njit(**_opts)
def _apply_1q(psi, target, m00, m01, m10, m11):
    mask = 1 << target
    for i in range(psi.shape[0]):
        if i & mask:
            continue
        j = i | mask
        a0 = psi[i]
        a1 = psi[j]
        psi[i] = m00 * a0 + m01 * a1
        psi[j] = m10 * a0 + m11 * a1


@nb.njit(**_opts)
def _apply_cx(psi, control, target):
    cmask = 1 << control
    tmask = 1 << target
    for i in range(psi.shape[0]):
        if (i & cmask) and not (i & tmask):
            j = i | tmask
            tmp = psi[i]
            psi[i] = psi[j]
            psi[j] = tmp


@nb.njit(**_opts)
def _run_one(psi, kinds, targets, controls, angles):
    for g in range(kinds.shape[0]):
        kind = kinds[g]
        t = targets[g]
        if kind == CNOT:
            _apply_cx(psi, controls[g], t)
        elif kind == H:
            h = complex(_INV_SQRT2, 0.0)
            _apply_1q(psi, t, h, h, h, -h)
        elif kind == X:
            _apply_1q(psi, t, 0j, 1 + 0j, 1 + 0j, 0j)
        elif kind == RY:
            c = math.cos(0.5 * angles[g])
            s = math.sin(0.5 * angles[g])
            _apply_1q(psi, t, complex(c, 0.0), complex(-s, 0.0), complex(s, 0.0), complex(c, 0.0))
        elif kind == RZ:
            half = 0.5 * angles[g]
            c = math.cos(half)
            s = math.sin(half)
            _apply_1q(psi, t, complex(c, -s), 0j, 0j, complex(c, s))


@nb.njit(**_opts)
def simulate(kinds, targets, controls, angles, states):
    shared = angles.shape[0] == 1
    for b in range(states.shape[0]):
        row = 0 if shared else b
        _run_one(states[b], kinds, targets, controls, angles[row])
    return states


@nb.njit(**_opts)
def parity_expectation(states):
    out = np.zeros(states.shape[0])
    for b in range(states.shape[0]):
        acc = 0.0
        for i in range(states.shape[1]):
            a = states[b, i]
            p = a.real * a.real + a.imag * a.imag
            v = i
            odd = 0
            while v:
                odd ^= v & 1
                v >>= 1
            acc += -p if odd else p
        out[b] = acc
    return out


@nb.njit(**_opts)
def fidelity_matrix(states1, states2, symmetric):
    n1 = states1.shape[0]
    n2 = states2.shape[0]
    dim = states1.shape[1]
    k = np.zeros((n1, n2))
    for i in range(n1):
        j0 = i + 1 if symmetric else 0
        if symmetric:
            k[i, i] = 1.0
        for j in range(j0, n2):
            acc = 0j
            for d in range(dim):
                acc += states1[i, d].conjugate() * states2[j, d]
            v = acc.real * acc.real + acc.imag * acc.imag
            k[i, j] = v
            if symmetric:
                k[j, i] = v
    return k


@nb.njit(**_opts)
def _take_step(i, j, alpha, y, kmat, errors, b, c, eps):
    if i == j:
        return False, b
    ai = alpha[i]
    aj = alpha[j]
    yi = y[i]
    yj = y[j]
    ei = errors[i]
    ej = errors[j]
    s = yi * yj
    if yi != yj:
        lo = max(0.0, aj - ai)
        hi = min(c, c + aj - ai)
    else:
        lo = max(0.0, ai + aj - c)
        hi = min(c, ai + aj)
    if hi - lo < eps:
        return False, b
    kii = kmat[i, i]
    kjj = kmat[j, j]
    kij = kmat[i, j]
    eta = 2.0 * kij - kii - kjj
    if eta < -eps:
        aj_new = aj - yj * (ei - ej) / eta
        aj_new = min(max(aj_new, lo), hi)
    else:
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
    shift = b_new - b
    for k in range(errors.shape[0]):
        errors[k] += yi * dai * kmat[i, k] + yj * daj * kmat[j, k] + shift
    alpha[i] = ai_new
    alpha[j] = aj_new
    return True, b_new


@nb.njit(**_opts)
def smo(kmat, y, c, tol, max_passes, draws, eps):
    n = y.shape[0]
    alpha = np.zeros(n)
    errors = np.empty(n)
    for k in range(n):
        errors[k] = -y[k]
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
