"""EPR pairs, S^a-rotated Bell measurement and teleported T/T† evaluation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import circuit as C
from .statevec import StateVector, apply_gates, measure_qubit, reset_qubit


@dataclass(frozen=True)
class EprPair:
    client: int  # c_i
    server: int  # s_i

    def __post_init__(self):
        if self.client == self.server:
            raise ValueError("EPR pair needs two distinct qubits")


@dataclass(frozen=True)
class BellOutcome:
    index: int
    r_a: int
    r_b: int

    def __post_init__(self):
        if self.r_a not in (0, 1) or self.r_b not in (0, 1):
            raise ValueError(f"Bell outcome bits must be 0/1, got {self.r_a}, {self.r_b}")
        if self.index < 1:
            raise ValueError("teleport indices start at 1")

    @property
    def bits(self) -> tuple[int, int]:
        return self.r_a, self.r_b


def make_epr(state: StateVector, c: int, s: int) -> StateVector:
    """Turn |00> on (c, s) into (|00> + |11>)/sqrt(2). Both qubits must start in |0>."""
    return apply_gates(state, [C.gate(C.H, c), C.gate(C.CNOT, c, s)])


def rotated_bell_measure(
    state: StateVector,
    first: int,
    second: int,
    a: int,
    rng: np.random.Generator,
    index: int = 1,
    force: tuple[int, int] | None = None,
) -> tuple[BellOutcome, StateVector]:
    """Measure (first, second) in the basis {(S^-a Z^rb X^ra (x) I)|Phi_00>}.

    ``first`` is the qubit that carries the teleported data (s_i), ``second``
    its EPR partner (c_i).  Circuit: S^a on first, CNOT first->second, H on
    first, then Z measurements; second's bit is r_a and first's bit is r_b.
    ``force`` postselects a given (r_a, r_b).
    """
    if first == second:
        raise ValueError("rotated Bell measurement on a single qubit")
    if a not in (0, 1):
        raise ValueError(f"rotation exponent must be 0 or 1, got {a}")
    gates = [C.gate(C.S, first)] if a else []
    gates += [C.gate(C.CNOT, first, second), C.gate(C.H, first)]
    state = apply_gates(state, gates)
    r_a, state = measure_qubit(state, second, rng, None if force is None else force[0])
    r_b, state = measure_qubit(state, first, rng, None if force is None else force[1])
    return BellOutcome(index, r_a, r_b), state


def evaluate_t_gate(state: StateVector, w: int, pair: EprPair, kind: str) -> StateVector:
    """Server half of a teleported T/T†: apply the gate to w, then SWAP(w, s_i).

    Afterwards the data sits on s_i and w holds s_i's EPR half; the rotated
    Bell measurement on (s_i, c_i) completes the teleport back onto w.
    """
    if kind not in C.T_KINDS:
        raise ValueError(f"evaluate_t_gate handles T/TDG, got {kind!r}")
    if w in (pair.client, pair.server):
        raise ValueError(f"data qubit {w} collides with EPR pair {pair}")
    return apply_gates(state, [C.gate(kind, w), C.gate(C.SWAP, w, pair.server)])


def reset_pair(state: StateVector, pair: EprPair, rng: np.random.Generator) -> StateVector:
    state = reset_qubit(state, pair.client, rng)
    return reset_qubit(state, pair.server, rng)
