"""Dense statevector simulation over a minimal gate set.

Conventions
-----------
* Qubit 0 is the least significant bit of the basis index, so the amplitude
  of ``|q_{n-1} ... q_1 q_0>`` lives at index ``sum(q_k << k)``.  Bitstrings
  returned by :func:`measure_counts` print qubit 0 rightmost.
* ``RY(t) = exp(-i t Y / 2)`` and ``RZ(t) = exp(-i t Z / 2)``.

A state is a plain 1-D ``complex128`` array of length ``2**n``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from . import kernels
from .errors import StructureError
from .kernels.codes import CNOT, CODES, NAMES, PARAMETRIC

GATE_KINDS = tuple(CODES)


@dataclass(frozen=True)
class GateOp:
    kind: str
    target: int
    control: Optional[int] = None
    angle: Optional[float] = None

    def __post_init__(self):
        if self.kind not in CODES:
            raise StructureError(f"unknown gate kind {self.kind!r}; expected one of {GATE_KINDS}")
        code = CODES[self.kind]
        if code == CNOT:
            if self.control is None:
                raise StructureError("CNOT needs a control qubit")
            if self.control == self.target:
                raise StructureError(f"control and target are both qubit {self.target}")
        elif self.control is not None:
            raise StructureError(f"{self.kind} takes no control qubit")
        if code in PARAMETRIC:
            if self.angle is None or not np.isfinite(self.angle):
                raise StructureError(f"{self.kind} needs a finite angle")
        elif self.angle is not None:
            raise StructureError(f"{self.kind} takes no angle")

    def qubits(self):
        return (self.target,) if self.control is None else (self.control, self.target)

    def to_text(self):
        parts = [str(q) for q in self.qubits()]
        if self.angle is not None:
            parts.append(repr(float(self.angle)))
        return f"{self.kind} {','.join(parts)}"

    @classmethod
    def from_text(cls, line):
        try:
            kind, rest = line.split(maxsplit=1)
            fields = rest.split(",")
            if CODES[kind] == CNOT:
                control, target = (int(f) for f in fields)
                return cls(kind, target, control=control)
            if CODES[kind] in PARAMETRIC:
                q, angle = fields
                return cls(kind, int(q), angle=float(angle))
            (q,) = fields
            return cls(kind, int(q))
        except (ValueError, KeyError) as exc:
            raise StructureError(f"cannot parse gate line {line!r}") from exc


class Circuit:
    """Append-only gate list on a fixed number of qubits."""

    def __init__(self, n_qubits: int, ops: Iterable[GateOp] = ()):
        if n_qubits < 1:
            raise StructureError("a circuit needs at least one qubit")
        self.n_qubits = int(n_qubits)
        self._ops: list[GateOp] = []
        for op in ops:
            self.append(op)

    @property
    def ops(self) -> tuple[GateOp, ...]:
        return tuple(self._ops)

    def __len__(self):
        return len(self._ops)

    def __iter__(self):
        return iter(self._ops)

    def __eq__(self, other):
        return isinstance(other, Circuit) and self.n_qubits == other.n_qubits and self._ops == other._ops

    def append(self, op: GateOp) -> "Circuit":
        for q in op.qubits():
            if not 0 <= q < self.n_qubits:
                raise StructureError(f"qubit {q} out of range for a {self.n_qubits}-qubit circuit")
        self._ops.append(op)
        return self

    def extend(self, other: "Circuit") -> "Circuit":
        if other.n_qubits != self.n_qubits:
            raise StructureError(f"cannot extend a {self.n_qubits}-qubit circuit with {other.n_qubits} qubits")
        for op in other:
            self.append(op)
        return self

    def h(self, q):
        return self.append(GateOp("H", q))

    def x(self, q):
        return self.append(GateOp("X", q))

    def ry(self, q, angle):
        return self.append(GateOp("RY", q, angle=float(angle)))

    def rz(self, q, angle):
        return self.append(GateOp("RZ", q, angle=float(angle)))

    def cnot(self, control, target):
        return self.append(GateOp("CNOT", target, control=control))

    def compile(self):
        """Return ``(kinds, targets, controls, angles)`` arrays for the kernels."""
        g = len(self._ops)
        kinds = np.empty(g, dtype=np.int64)
        targets = np.empty(g, dtype=np.int64)
        controls = np.full(g, -1, dtype=np.int64)
        angles = np.zeros(g)
        for i, op in enumerate(self._ops):
            kinds[i] = CODES[op.kind]
            targets[i] = op.target
            if op.control is not None:
                controls[i] = op.control
            if op.angle is not None:
                angles[i] = op.angle
        return kinds, targets, controls, angles

    def to_text(self) -> str:
        """Line-oriented dump: a ``QUBITS n`` header then ``KIND q[,q2][,angle]`` per gate."""
        lines = [f"QUBITS {self.n_qubits}"] + [op.to_text() for op in self._ops]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Circuit":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
        if not lines or not lines[0].startswith("QUBITS "):
            raise StructureError("circuit text must start with 'QUBITS <n>'")
        circ = cls(int(lines[0].split()[1]))
        for ln in lines[1:]:
            circ.append(GateOp.from_text(ln))
        return circ

    def __repr__(self):
        return f"Circuit(n_qubits={self.n_qubits}, gates={len(self._ops)})"


def zero_state(n_qubits: int) -> np.ndarray:
    psi = np.zeros(2 ** n_qubits, dtype=np.complex128)
    psi[0] = 1.0
    return psi


def _width(psi):
    dim = psi.shape[-1]
    n = dim.bit_length() - 1
    if dim < 2 or 1 << n != dim:
        raise StructureError(f"state length {dim} is not a power of two")
    return n


def apply_gate(psi: np.ndarray, gate: GateOp) -> np.ndarray:
    """Apply one gate to ``psi`` in place and return it."""
    n = _width(psi)
    for q in gate.qubits():
        if not 0 <= q < n:
            raise StructureError(f"qubit {q} out of range for a {n}-qubit state")
    if psi.dtype != np.complex128 or not psi.flags.c_contiguous:
        raise StructureError("state must be a contiguous complex128 array")
    kinds, targets, controls, angles = Circuit(n, [gate]).compile()
    kernels.simulate(kinds, targets, controls, angles[None, :], psi[None, :])
    return psi


def run(circuit: Circuit, psi0: Optional[np.ndarray] = None) -> np.ndarray:
    """Apply ``circuit`` left to right to a copy of ``psi0`` (default ``|0...0>``)."""
    if psi0 is None:
        psi = zero_state(circuit.n_qubits)
    else:
        if _width(psi0) != circuit.n_qubits:
            raise StructureError(f"state has {_width(psi0)} qubits, circuit has {circuit.n_qubits}")
        psi = np.array(psi0, dtype=np.complex128)
    return run_batch(circuit, psi[None, :])[0]


def run_batch(circuit: Circuit, states: np.ndarray, angles: Optional[np.ndarray] = None) -> np.ndarray:
    """Run one gate structure over a batch of states (rows), returning new states.

    ``angles`` optionally overrides the circuit's angles: shape ``(B, G)``
    gives each row its own angle set while sharing the gate structure.
    """
    states = np.array(states, dtype=np.complex128, ndmin=2)
    if _width(states) != circuit.n_qubits:
        raise StructureError(f"states have {_width(states)} qubits, circuit has {circuit.n_qubits}")
    kinds, targets, controls, own = circuit.compile()
    if angles is None:
        angles = own[None, :]
    else:
        angles = np.ascontiguousarray(angles, dtype=np.float64)
        if angles.ndim != 2 or angles.shape[1] != len(kinds) or angles.shape[0] not in (1, states.shape[0]):
            raise StructureError(f"angle matrix shape {angles.shape} does not fit {states.shape[0]} states x {len(kinds)} gates")
    return kernels.simulate(kinds, targets, controls, angles, states)


def expectation_parity_z(psi: np.ndarray) -> float:
    """<psi| Z x ... x Z |psi>: sum over basis states of (-1)**popcount * probability."""
    return float(kernels.parity_expectation(np.array(psi, dtype=np.complex128, ndmin=2))[0])


def measure_counts(psi: np.ndarray, shots: int, seed: int) -> dict[str, int]:
    """Sample ``shots`` computational-basis outcomes; deterministic for a seed."""
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    n = _width(psi)
    probs = np.abs(psi) ** 2
    probs = probs / probs.sum()
    counts = np.random.default_rng(seed).multinomial(shots, probs)
    return {format(i, f"0{n}b"): int(c) for i, c in enumerate(counts) if c}


def unitary(circuit: Circuit) -> np.ndarray:
    """Dense matrix of ``circuit``; column ``k`` is the image of basis state ``k``."""
    dim = 2 ** circuit.n_qubits
    return run_batch(circuit, np.eye(dim, dtype=np.complex128)).T.copy()
