import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qhegrover import circuit as C
from qhegrover.grover import fixture_circuit
from qhegrover.keys import (
    CliffordStep,
    KeyUpdateProgram,
    PauliKey,
    TeleportStep,
    clifford_update,
    f_final,
    f_i,
    g_i,
    key_trace,
    program_from_circuit,
    replay_final_key,
    teleport_update,
)
from qhegrover.qhe import parse_bell_string
from qhegrover.statevec import unitary

from conftest import REFERENCE_ROWS
from oracles import S, SDG, T, circuit_matrix, gate_matrix, key_operator, pauli_mask, proportional

SK = PauliKey.from_strings("111", "111")
CLIFFORD_CASES = [
    (C.X, (0,)), (C.Z, (0,)), (C.H, (0,)), (C.S, (0,)), (C.SDG, (0,)),
    (C.CNOT, (0, 1)), (C.CNOT, (1, 0)), (C.SWAP, (0, 1)),
]


def test_examples():
    k = PauliKey((1, 0), (0, 1))
    assert clifford_update(k, C.H, (0,)) == PauliKey((0, 0), (1, 1))
    assert clifford_update(k, C.S, (0,)) == PauliKey((1, 0), (1, 1))
    assert clifford_update(k, C.X, (1,)) == k
    assert clifford_update(k, C.CNOT, (0, 1)) == PauliKey((1, 1), (1, 1))
    assert clifford_update(k, C.SWAP, (0, 1)) == PauliKey((0, 1), (1, 0))


def test_teleport_examples():
    k = PauliKey((1,), (0,))
    assert teleport_update(k, 0, C.T, 0, 0) == PauliKey((1,), (1,))
    assert teleport_update(k, 0, C.TDG, 0, 0) == PauliKey((1,), (0,))
    assert teleport_update(k, 0, C.T, 1, 1) == PauliKey((0,), (0,))


def test_rule_errors():
    k = PauliKey.zeros(2)
    with pytest.raises(ValueError):
        clifford_update(k, C.T, (0,))
    with pytest.raises(IndexError):
        clifford_update(k, C.H, (2,))
    with pytest.raises(ValueError):
        teleport_update(k, 0, C.H, 0, 0)
    with pytest.raises(ValueError):
        PauliKey((0, 1), (0,))


@pytest.mark.parametrize("kind,qubits", CLIFFORD_CASES)
def test_conjugation_soundness(kind, qubits):
    """U X^a Z^b = phase * X^a' Z^b' U for every key, with |phase| = 1."""
    U = gate_matrix(kind, qubits, 2)
    for bits in itertools.product((0, 1), repeat=4):
        key = PauliKey(bits[:2], bits[2:])
        new = clifford_update(key, kind, qubits)
        lhs = U @ key_operator([key.pair(0), key.pair(1)], 2)
        rhs = key_operator([new.pair(0), new.pair(1)], 2) @ U
        dev, phase = proportional(lhs, rhs)
        assert dev < 1e-12
        assert abs(abs(phase) - 1) < 1e-12


@pytest.mark.parametrize("a,b", list(itertools.product((0, 1), repeat=2)))
def test_t_error_identity(a, b):
    lhs = T @ pauli_mask(a, b)
    rhs = np.linalg.matrix_power(SDG, a) @ pauli_mask(a, a ^ b) @ T
    dev, phase = proportional(lhs, rhs)
    assert dev < 1e-12 and abs(abs(phase) - 1) < 1e-12


@pytest.mark.parametrize("kind", [C.T, C.TDG])
@pytest.mark.parametrize("a,b", list(itertools.product((0, 1), repeat=2)))
def test_teleport_rule_with_correction(kind, a, b):
    """Both T and T† leave a (S†)^a residue; S^a removes it and the rule predicts the mask."""
    U = T if kind == C.T else T.conj().T
    new = teleport_update(PauliKey((a,), (b,)), 0, kind, 0, 0)
    lhs = np.linalg.matrix_power(S, a) @ U @ pauli_mask(a, b)
    dev, _ = proportional(lhs, pauli_mask(*new.pair(0)) @ U)
    assert dev < 1e-12


keys2 = st.tuples(*[st.integers(0, 1)] * 4).map(lambda t: PauliKey(t[:2], t[2:]))


@given(keys2, keys2, st.sampled_from(CLIFFORD_CASES))
def test_clifford_rules_linear(k1, k2, case):
    kind, qs = case
    summed = PauliKey(
        tuple(x ^ y for x, y in zip(k1.a, k2.a)), tuple(x ^ y for x, y in zip(k1.b, k2.b))
    )
    u1, u2 = clifford_update(k1, kind, qs), clifford_update(k2, kind, qs)
    assert clifford_update(summed, kind, qs) == PauliKey(
        tuple(x ^ y for x, y in zip(u1.a, u2.a)), tuple(x ^ y for x, y in zip(u1.b, u2.b))
    )


@given(keys2, st.integers(0, 1), st.integers(0, 1), st.sampled_from([C.T, C.TDG]))
def test_teleport_rule_affine_in_outcomes(k, r_a, r_b, kind):
    base = teleport_update(k, 0, kind, 0, 0)
    moved = teleport_update(k, 0, kind, r_a, r_b)
    assert moved.pair(0) == (base.a[0] ^ r_a, base.b[0] ^ r_b)
    assert moved.pair(1) == k.pair(1)


def _pauli_frame(U, key, n):
    """Oracle: decompose U K U† into X^a Z^b by brute force over all Pauli masks."""
    target = U @ key_operator([key.pair(q) for q in range(n)], n) @ U.conj().T
    for bits in itertools.product((0, 1), repeat=2 * n):
        cand = PauliKey(bits[:n], bits[n:])
        dev, _ = proportional(target, key_operator([cand.pair(q) for q in range(n)], n))
        if dev < 1e-9:
            return cand
    raise AssertionError("not a Pauli")


def test_g1_on_fixture_matches_frame_oracle():
    fixture = fixture_circuit()
    prog = program_from_circuit(fixture)
    first_t = fixture.t_positions()[0]
    assert first_t == 16
    U = circuit_matrix(fixture.gates[: first_t - 1], 3)
    frame = _pauli_frame(U, SK, 3)
    w = fixture.gates[first_t - 1].qubits[0]
    assert g_i(prog, SK, 1) == frame.a[w]


@given(st.integers(0, 2**32 - 1))
def test_clifford_replay_matches_frame_oracle(seed):
    rng = np.random.default_rng(seed)
    circ = C.random_lowered_circuit(2, 8, rng, t_fraction=0.0)
    key = PauliKey(tuple(rng.integers(0, 2, 2)), tuple(rng.integers(0, 2, 2)))
    prog = program_from_circuit(circ)
    assert f_final(prog, key) == _pauli_frame(unitary(circ.gates, 2), key, 2)


def test_program_shape():
    prog = program_from_circuit(fixture_circuit())
    assert prog.M == 7 and prog.n == 3
    assert len(prog.segments()) == 8
    back = KeyUpdateProgram.from_records(3, prog.to_records())
    assert back == prog
    with pytest.raises(ValueError):
        KeyUpdateProgram(1, (TeleportStep(2, 0, C.T),))
    with pytest.raises(IndexError):
        g_i(prog, SK, 8)


@pytest.mark.parametrize("row", REFERENCE_ROWS[:2])
def test_reference_rows_replay(row):
    sim, k2, k1, k0, expected = row
    prog = program_from_circuit(fixture_circuit())
    final = replay_final_key(prog, SK, parse_bell_string(sim[:14]))
    assert (final.pair(2), final.pair(1), final.pair(0)) == (k2, k1, k0)


def test_replay_equals_stepwise():
    prog = program_from_circuit(fixture_circuit())
    outs = parse_bell_string(REFERENCE_ROWS[0][0][:14])
    key = SK
    for i, (ra, rb) in enumerate(outs, start=1):
        key = f_i(prog, key, i, ra, rb)
    keys, exps = key_trace(prog, SK, outs)
    assert f_final(prog, key) == keys[-1]
    assert len(exps) == 7


@pytest.mark.parametrize("i,expected", [(2, (2, 4)), (3, (8, 16)), (7, (2048, 4096))])
def test_rotation_exponent_depends_on_earlier_outcomes(i, expected):
    """Count the earlier-outcome combinations for which the i-th rotation uses S."""
    prog = program_from_circuit(fixture_circuit())
    hits = total = 0
    for bits in itertools.product((0, 1), repeat=2 * (i - 1)):
        outs = [bits[2 * k: 2 * k + 2] for k in range(i - 1)] + [(0, 0)] * (7 - i + 1)
        _, exps = key_trace(prog, SK, outs)
        hits += exps[i - 1]
        total += 1
    assert (hits, total) == expected
