import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qhegrover import circuit as C
from qhegrover.circuit import gate
from qhegrover.grover import (
    FIXTURE_MARKED,
    GroverSpec,
    anf_monomials,
    build_diffusion,
    build_grover,
    build_oracle,
    default_iterations,
    grover_success_probability,
    lower_to_clifford_t,
    mcx_ladder,
    fixture_circuit,
    toffoli_network,
)
from qhegrover.statevec import StateVector, apply_gates, marginal, restrict, simulate, unitary

from oracles import circuit_matrix, gate_matrix, proportional


def _marked_sets(n, max_m):
    words = [format(x, f"0{n}b") for x in range(2 ** n)]
    for m in range(1, max_m + 1):
        yield from itertools.combinations(words, m)


def test_spec_validation():
    for bad in [dict(n=0, marked=("",)), dict(n=2, marked=()), dict(n=2, marked=("0",)),
                dict(n=2, marked=("02",)), dict(n=2, marked=("01", "01")),
                dict(n=1, marked=("0", "1")), dict(n=2, marked=("01",), iterations=-1)]:
        with pytest.raises(ValueError):
            GroverSpec(**bad)


def test_default_iterations():
    assert default_iterations(8, 2) == 1
    assert default_iterations(4, 1) == 1
    assert default_iterations(16, 1) == 3
    assert default_iterations(8, 7) == 1
    assert GroverSpec(4, ("0101",)).rounds == 3


def test_fixture_shape():
    fx = fixture_circuit()
    assert len(fx) == 35
    assert fx.t_positions() == [16, 18, 20, 22, 23, 26, 27]
    assert fx.gates[0] == gate(C.H, 0) and fx.gates[1] == gate(C.CNOT, 2, 0)
    assert [g.kind for g in fx.gates[32:]] == [C.H] * 3
    assert fx.prep == C.PREP_UNIFORM


def test_reduced_build_reproduces_fixture():
    spec = GroverSpec(3, FIXTURE_MARKED, iterations=1, reduce=True, prep_gates=False)
    lowered, report = lower_to_clifford_t(build_grover(spec))
    assert lowered == fixture_circuit()
    assert (report.toffoli_count, report.t_count, report.ancilla_count, report.total_gate_count) == (1, 7, 0, 35)


def test_fixture_oracle_is_two_czs():
    assert build_oracle(3, FIXTURE_MARKED, reduce=True) == [gate(C.CZ, 2, 0), gate(C.CZ, 1, 0)]


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_oracle_phase(n):
    for marked in _marked_sets(n, min(3, 2 ** n - 1)):
        for reduce in (False, True):
            U = unitary(build_oracle(n, marked, reduce), n)
            signs = [-1 if format(x, f"0{n}b") in marked else 1 for x in range(2 ** n)]
            dev, phase = proportional(U, np.diag(signs).astype(complex))
            assert dev < 1e-12
            # the reduced form drops the constant ANF term, a global sign at most
            assert abs(phase - 1) < 1e-12 or (reduce and abs(phase + 1) < 1e-12)


def test_anf_example():
    assert anf_monomials(3, FIXTURE_MARKED) == [frozenset({2, 0}), frozenset({1, 0})]
    assert anf_monomials(2, ("11",)) == [frozenset({0, 1})]


@pytest.mark.parametrize("n", [2, 3, 4])
def test_diffusion_is_reflection(n):
    U = unitary(build_diffusion(n), n)
    s = np.full(2 ** n, 2 ** (-n / 2))
    dev, _ = proportional(U, 2 * np.outer(s, s) - np.eye(2 ** n))
    assert dev < 1e-12


def test_toffoli_network_unitary():
    U = circuit_matrix(toffoli_network(2, 1, 0), 3)
    dev, phase = proportional(U, gate_matrix(C.TOFFOLI, (2, 1, 0), 3))
    assert dev < 1e-12 and abs(abs(phase) - 1) < 1e-12
    kinds = [g.kind for g in toffoli_network(0, 1, 2)]
    assert (kinds.count(C.H), kinds.count(C.CNOT), kinds.count(C.T) + kinds.count(C.TDG)) == (2, 6, 7)


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_mcx_ladder_basis_states(k):
    controls, target = list(range(k)), k
    anc = list(range(k + 1, 2 * k))
    n = 2 * k
    gates = mcx_ladder(controls, target, anc)
    assert sum(g.kind == C.TOFFOLI for g in gates) == 2 * (k - 1)
    for x in range(2 ** (k + 1)):
        out = apply_gates(StateVector.basis(n, x), gates)
        expected = x ^ (1 << target) if all(x >> c & 1 for c in controls) else x
        assert abs(out.amplitudes[expected]) == pytest.approx(1)


def test_ladder_errors():
    with pytest.raises(ValueError):
        mcx_ladder([0], 1, [])
    with pytest.raises(ValueError):
        mcx_ladder([0, 1, 2], 3, [4])


@settings(max_examples=25)
@given(st.integers(2, 4), st.data(), st.booleans())
def test_lowering_preserves_action(n, data, reduce):
    x = data.draw(st.integers(0, 2 ** n - 1))
    marked = (format(x, f"0{n}b"),)
    circ = build_grover(GroverSpec(n, marked, iterations=1, reduce=reduce))
    lowered, report = lower_to_clifford_t(circ)
    assert all(g.kind in C.LOWERED_KINDS for g in lowered.gates)
    psi = StateVector.random(n, np.random.default_rng(x))
    a = simulate(circ, psi)
    b = simulate(lowered, psi)
    # ancillas come back clean, and the data register matches
    data_only = restrict(b, n)
    assert abs(np.vdot(a.amplitudes, data_only.amplitudes)) == pytest.approx(1, abs=1e-10)


def test_ancillas_shared_between_blocks():
    circ = build_grover(GroverSpec(5, ("10101", "00011"), iterations=2))
    lowered, report = lower_to_clifford_t(circ)
    assert lowered.num_ancillas == 3 == report.ancilla_count


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_t_count_one_round(n):
    spec = GroverSpec(n, ("1" * n,), iterations=1, prep_gates=False)
    _, report = lower_to_clifford_t(build_grover(spec))
    assert report.t_count == 28 * (n - 2)
    assert report.ancilla_count == n - 2


def test_success_probability_examples():
    assert grover_success_probability(3, 2, 1) == pytest.approx(1.0)
    assert grover_success_probability(2, 1, 1) == pytest.approx(1.0)
    assert grover_success_probability(3, 1, 0) == pytest.approx(1 / 8)
    with pytest.raises(ValueError):
        grover_success_probability(2, 4, 1)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_success_probability_exact(n):
    rng = np.random.default_rng(n)
    for m in range(1, min(3, 2 ** n - 1) + 1):
        marked = tuple(format(int(x), f"0{n}b") for x in rng.choice(2 ** n, m, replace=False))
        spec = GroverSpec(n, marked, reduce=bool(rng.integers(2)))
        probs = marginal(simulate(build_grover(spec)), range(n))
        got = sum(probs[w] for w in marked)
        assert got == pytest.approx(grover_success_probability(n, m, spec.rounds), abs=1e-10)


def test_prep_gates_equivalent_to_uniform_header():
    a = simulate(build_grover(GroverSpec(3, FIXTURE_MARKED, prep_gates=True)))
    b = simulate(build_grover(GroverSpec(3, FIXTURE_MARKED, prep_gates=False)))
    assert np.allclose(a.amplitudes, b.amplitudes)


def test_lower_empty_circuit():
    empty = C.CircuitIR(1, (), level=C.EXTENDED)
    lowered, report = lower_to_clifford_t(empty)
    assert len(lowered) == 0 and report.t_count == 0
    assert math.isclose(report.total_gate_count, 0)
    assert "Toffolis" in report.table()
