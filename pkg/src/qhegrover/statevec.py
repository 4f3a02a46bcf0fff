"""Dense statevector simulation with seeded measurement and reset.

Basis index bit k is qubit q_k (little-endian), so a basis label printed
left to right reads q_{n-1} ... q_0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import circuit as C
from .circuit import CircuitIR, GateOp

MAX_QUBITS = 20

_SQ2 = 1 / np.sqrt(2)
MATRICES = {
    C.X: np.array([[0, 1], [1, 0]], dtype=complex),
    C.Z: np.array([[1, 0], [0, -1]], dtype=complex),
    C.H: np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex),
    C.S: np.diag([1, 1j]),
    C.SDG: np.diag([1, -1j]),
    C.T: np.diag([1, np.exp(1j * np.pi / 4)]),
    C.TDG: np.diag([1, np.exp(-1j * np.pi / 4)]),
}
# phase picked up by |1> for the diagonal kinds
_PHASE = {
    C.Z: -1.0,
    C.S: 1j,
    C.SDG: -1j,
    C.T: np.exp(1j * np.pi / 4),
    C.TDG: np.exp(-1j * np.pi / 4),
}


class StateVector:
    """2^n complex amplitudes; mutated only by the operation that owns it."""

    __slots__ = ("num_qubits", "amplitudes")

    def __init__(self, num_qubits: int, amplitudes=None):
        if num_qubits < 1:
            raise ValueError("need at least one qubit")
        if num_qubits > MAX_QUBITS:
            raise ValueError(f"{num_qubits} qubits exceeds the dense limit of {MAX_QUBITS}")
        if amplitudes is None:
            amplitudes = np.zeros(1 << num_qubits, dtype=complex)
            amplitudes[0] = 1.0
        else:
            amplitudes = np.asarray(amplitudes, dtype=complex)
            if amplitudes.shape != (1 << num_qubits,):
                raise ValueError(
                    f"expected {1 << num_qubits} amplitudes, got shape {amplitudes.shape}"
                )
        self.num_qubits = num_qubits
        self.amplitudes = amplitudes

    @classmethod
    def zero(cls, num_qubits: int) -> StateVector:
        return cls(num_qubits)

    @classmethod
    def basis(cls, num_qubits: int, index: int) -> StateVector:
        amps = np.zeros(1 << num_qubits, dtype=complex)
        amps[index] = 1.0
        return cls(num_qubits, amps)

    @classmethod
    def from_bitstring(cls, bits: str) -> StateVector:
        """``bits`` reads q_{n-1} ... q_0."""
        return cls.basis(len(bits), int(bits, 2))

    @classmethod
    def random(cls, num_qubits: int, rng: np.random.Generator) -> StateVector:
        v = rng.normal(size=1 << num_qubits) + 1j * rng.normal(size=1 << num_qubits)
        return cls(num_qubits, v / np.linalg.norm(v))

    @classmethod
    def uniform(cls, num_qubits: int) -> StateVector:
        amps = np.full(1 << num_qubits, (1 << num_qubits) ** -0.5, dtype=complex)
        return cls(num_qubits, amps)

    def copy(self) -> StateVector:
        return StateVector(self.num_qubits, self.amplitudes.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def tensor_zeros(self, extra: int) -> StateVector:
        """Append ``extra`` qubits in |0> above the existing ones."""
        amps = np.zeros(1 << (self.num_qubits + extra), dtype=complex)
        amps[: 1 << self.num_qubits] = self.amplitudes
        return StateVector(self.num_qubits + extra, amps)

    def __repr__(self) -> str:
        return f"StateVector(num_qubits={self.num_qubits})"


def _check_qubits(n: int, qubits: Iterable[int]) -> None:
    for q in qubits:
        if not 0 <= q < n:
            raise IndexError(f"qubit {q} out of range for {n}-qubit state")


def _view(amps: np.ndarray, n: int, q: int) -> np.ndarray:
    # axis 1 of the view is qubit q
    return amps.reshape(1 << (n - 1 - q), 2, 1 << q)


def _mask_all(idx: np.ndarray, qubits: Iterable[int]) -> np.ndarray:
    m = 0
    for q in qubits:
        m |= 1 << q
    return (idx & m) == m


def _apply_inplace(amps: np.ndarray, n: int, g: GateOp) -> np.ndarray:
    """Apply ``g`` to ``amps``; may return a new array for permutation kinds."""
    kind, qs = g.kind, g.qubits
    if kind in _PHASE:
        v = _view(amps, n, qs[0])
        v[:, 1, :] *= _PHASE[kind]
        return amps
    if kind == C.X:
        v = _view(amps, n, qs[0])
        v[:] = v[:, ::-1, :].copy()
        return amps
    if kind == C.H:
        v = _view(amps, n, qs[0])
        a0 = v[:, 0, :].copy()
        a1 = v[:, 1, :]
        v[:, 0, :] = (a0 + a1) * _SQ2
        v[:, 1, :] = (a0 - a1) * _SQ2
        return amps
    idx = np.arange(amps.size)
    if kind in (C.CZ, C.CCZ):
        amps[_mask_all(idx, qs)] *= -1
        return amps
    if kind in (C.CNOT, C.TOFFOLI, C.MCX):
        t = 1 << qs[-1]
        hit = _mask_all(idx, qs[:-1])
        src = np.where(hit, idx ^ t, idx)
        return amps[src]
    if kind == C.SWAP:
        a, b = qs
        differ = ((idx >> a) ^ (idx >> b)) & 1
        src = np.where(differ == 1, idx ^ ((1 << a) | (1 << b)), idx)
        return amps[src]
    raise ValueError(f"cannot simulate gate kind {kind!r}")


def apply_gate(state: StateVector, g: GateOp) -> StateVector:
    _check_qubits(state.num_qubits, g.qubits)
    amps = _apply_inplace(state.amplitudes.copy(), state.num_qubits, g)
    return StateVector(state.num_qubits, amps)


def apply_gates(state: StateVector, gates: Iterable[GateOp]) -> StateVector:
    n = state.num_qubits
    amps = state.amplitudes.copy()
    for g in gates:
        _check_qubits(n, g.qubits)
        amps = _apply_inplace(amps, n, g)
    return StateVector(n, amps)


def initial_state(circuit: CircuitIR) -> StateVector:
    """The circuit's declared input: data register per ``prep``, ancillas |0>."""
    if circuit.prep == C.PREP_UNIFORM:
        data = StateVector.uniform(circuit.num_qubits)
    else:
        data = StateVector.zero(circuit.num_qubits)
    return data.tensor_zeros(circuit.num_ancillas) if circuit.num_ancillas else data


def simulate(circuit: CircuitIR, state: StateVector | None = None) -> StateVector:
    """Run every gate of ``circuit``; ``state`` defaults to its declared input."""
    if state is None:
        state = initial_state(circuit)
    elif state.num_qubits == circuit.num_qubits and circuit.num_ancillas:
        state = state.tensor_zeros(circuit.num_ancillas)
    if state.num_qubits != circuit.width:
        raise ValueError(f"state has {state.num_qubits} qubits, circuit needs {circuit.width}")
    return apply_gates(state, circuit.gates)


def prob_one(state: StateVector, q: int) -> float:
    _check_qubits(state.num_qubits, (q,))
    v = _view(state.amplitudes, state.num_qubits, q)
    return float(np.sum(np.abs(v[:, 1, :]) ** 2))


def measure_qubit(
    state: StateVector, q: int, rng: np.random.Generator, force: int | None = None
) -> tuple[int, StateVector]:
    """Projective Z measurement of qubit ``q``.

    ``force`` postselects the given outcome instead of sampling (used to
    replay recorded measurement outcomes); it must have nonzero probability.
    Exactly one uniform draw is consumed from ``rng`` either way so a forced
    run stays aligned with the unforced stream.
    """
    p1 = prob_one(state, q)
    u = rng.random()
    if force is None:
        bit = int(u < p1)
    else:
        bit = int(force)
        if (p1 if bit else 1 - p1) < 1e-12:
            raise ValueError(f"forced outcome {bit} on q{q} has zero probability")
    p = p1 if bit else 1 - p1
    amps = state.amplitudes.copy()
    v = _view(amps, state.num_qubits, q)
    v[:, 1 - bit, :] = 0
    amps /= np.sqrt(p)
    return bit, StateVector(state.num_qubits, amps)


def reset_qubit(state: StateVector, q: int, rng: np.random.Generator) -> StateVector:
    bit, post = measure_qubit(state, q, rng)
    if bit:
        post = apply_gate(post, C.gate(C.X, q))
    return post


def measure_all(
    state: StateVector, qubits: Iterable[int], rng: np.random.Generator
) -> tuple[list[int], StateVector]:
    bits = []
    for q in qubits:
        b, state = measure_qubit(state, q, rng)
        bits.append(b)
    return bits, state


def sample_counts(
    state: StateVector, qubits: Iterable[int], shots: int, rng: np.random.Generator
) -> dict[str, int]:
    """Histogram of ``shots`` Born-rule samples of ``qubits``.

    Keys are bitstrings ordered like ``qubits`` read from the highest listed
    index down, i.e. pass ``range(n)`` to get q_{n-1}...q_0 labels.
    """
    qubits = list(qubits)
    probs = state.probabilities()
    probs = probs / probs.sum()
    draws = rng.choice(probs.size, size=shots, p=probs)
    counts: dict[str, int] = {}
    for idx in draws:
        key = "".join(str((int(idx) >> q) & 1) for q in reversed(qubits))
        counts[key] = counts.get(key, 0) + 1
    return dict(sorted(counts.items()))


def marginal(state: StateVector, qubits: Iterable[int]) -> dict[str, float]:
    """Exact outcome distribution of ``qubits`` (labels as in ``sample_counts``)."""
    qubits = list(qubits)
    probs = state.probabilities()
    idx = np.arange(probs.size)
    key = np.zeros_like(idx)
    for pos, q in enumerate(reversed(qubits)):
        key = (key << 1) | ((idx >> q) & 1)
    width = len(qubits)
    out = np.bincount(key, weights=probs, minlength=1 << width)
    return {format(k, f"0{width}b"): float(p) for k, p in enumerate(out)}


def fidelity(a: StateVector, b: StateVector) -> float:
    """|<a|b>|^2, insensitive to global phase."""
    if a.num_qubits != b.num_qubits:
        raise ValueError(f"dimension mismatch: {a.num_qubits} vs {b.num_qubits} qubits")
    f = abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2
    return float(min(f, 1.0))


def restrict(state: StateVector, keep: int) -> StateVector:
    """Drop every qubit at index >= ``keep``.

    Valid only when those qubits are in a computational basis state (after
    measurement or reset); raises otherwise.
    """
    n = state.num_qubits
    block = state.amplitudes.reshape(1 << (n - keep), 1 << keep)
    weights = np.sum(np.abs(block) ** 2, axis=1)
    top = int(np.argmax(weights))
    if abs(weights[top] - 1.0) > 1e-9:
        raise ValueError("upper qubits are not in a computational basis state")
    return StateVector(keep, block[top].copy())


def unitary(gates: Iterable[GateOp], num_qubits: int) -> np.ndarray:
    """Column j is the image of basis state |j>; only for small registers."""
    gates = list(gates)
    dim = 1 << num_qubits
    cols = [apply_gates(StateVector.basis(num_qubits, j), gates).amplitudes for j in range(dim)]
    return np.stack(cols, axis=1)
