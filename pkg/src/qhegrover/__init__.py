"""Quantum homomorphic encryption (QOTP + gate teleportation) applied to Grover search."""

from .circuit import CircuitIR, GateOp, gate
from .statevec import StateVector, apply_gate, fidelity, measure_qubit, reset_qubit, simulate
from .keys import KeyUpdateProgram, PauliKey, clifford_update, replay_final_key, teleport_update
from .grover import GroverSpec, build_grover, lower_to_clifford_t, fixture_circuit
from .qhe import run_protocol

__all__ = [
    "CircuitIR", "GateOp", "gate",
    "StateVector", "apply_gate", "fidelity", "measure_qubit", "reset_qubit", "simulate",
    "KeyUpdateProgram", "PauliKey", "clifford_update", "replay_final_key", "teleport_update",
    "GroverSpec", "build_grover", "lower_to_clifford_t", "fixture_circuit",
    "run_protocol",
]
