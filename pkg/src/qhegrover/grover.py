"""Grover circuit construction and lowering to {X, Z, H, S, S†, T, T†, CNOT, SWAP}.

Marked strings are written q_{n-1} ... q_0, so for n=3 the string "011"
has q0 = q1 = 1 and q2 = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from . import circuit as C
from .circuit import CircuitIR, GateOp, gate


@dataclass(frozen=True)
class GroverSpec:
    n: int
    marked: tuple[str, ...]
    iterations: int | None = None  # None: floor(pi/4 * sqrt(N/m)), at least 1
    reduce: bool = False
    prep_gates: bool = True

    def __post_init__(self):
        marked = tuple(self.marked)
        object.__setattr__(self, "marked", marked)
        if self.n < 1:
            raise ValueError("Grover needs at least one qubit")
        if not marked:
            raise ValueError("the marked set is empty")
        for w in marked:
            if len(w) != self.n or set(w) - {"0", "1"}:
                raise ValueError(f"marked string {w!r} is not an {self.n}-bit string")
        if len(set(marked)) != len(marked):
            raise ValueError("marked strings must be distinct")
        if len(marked) >= 2 ** self.n:
            raise ValueError(f"m = {len(marked)} marked items leaves nothing unmarked (N = {2 ** self.n})")
        if self.iterations is not None and self.iterations < 0:
            raise ValueError("iteration count must be non-negative")

    @property
    def N(self) -> int:
        return 2 ** self.n

    @property
    def m(self) -> int:
        return len(self.marked)

    @property
    def rounds(self) -> int:
        if self.iterations is not None:
            return self.iterations
        return default_iterations(self.N, self.m)


def default_iterations(N: int, m: int) -> int:
    return max(1, math.floor(math.pi / 4 * math.sqrt(N / m)))


def grover_success_probability(n: int, m: int, R: int) -> float:
    N = 2 ** n
    if not 1 <= m < N:
        raise ValueError(f"need 1 <= m < N, got m={m}, N={N}")
    theta = math.asin(math.sqrt(m / N))
    return math.sin((2 * R + 1) * theta) ** 2


# --- phase-gate synthesis -----------------------------------------------------


def _bits(w: str) -> dict[int, int]:
    n = len(w)
    return {q: int(w[n - 1 - q]) for q in range(n)}


def phase_gate(qubits: Iterable[int], compact: bool) -> list[GateOp]:
    """(-1)^(AND of the qubits) on the listed qubits.

    The target is the lowest qubit and controls run from the highest down.
    With ``compact`` the 2- and 3-qubit cases use CZ/CCZ directly; otherwise
    everything goes through H-conjugated MCX as in the general recipe.
    """
    qs = sorted(qubits, reverse=True)
    if not qs:
        return []
    t = qs[-1]
    if len(qs) == 1:
        return [gate(C.Z, t)]
    if compact and len(qs) == 2:
        return [gate(C.CZ, *qs)]
    if compact and len(qs) == 3:
        return [gate(C.CCZ, *qs)]
    return [gate(C.H, t), gate(C.MCX, *qs), gate(C.H, t)]


def marked_phase_literal(n: int, w: str, compact: bool) -> list[GateOp]:
    """X-conjugated n-qubit phase gate flipping exactly |w>."""
    flips = [gate(C.X, q) for q, bit in _bits(w).items() if bit == 0]
    return flips + phase_gate(range(n), compact) + flips


def anf_monomials(n: int, marked: Iterable[str]) -> list[frozenset[int]]:
    """Algebraic normal form of the indicator of ``marked`` over GF(2).

    Each monomial is a set of qubits; (-1)^f factorises into one phase gate
    per monomial.  The constant term is a global phase and is dropped.
    """
    coeff = [0] * (1 << n)
    for w in marked:
        coeff[int(w, 2)] ^= 1
    # Moebius transform over the subset lattice
    for q in range(n):
        bit = 1 << q
        for x in range(1 << n):
            if x & bit:
                coeff[x] ^= coeff[x ^ bit]
    monos = [frozenset(q for q in range(n) if x >> q & 1) for x in range(1, 1 << n) if coeff[x]]
    return sorted(monos, key=lambda s: (len(s), [-q for q in sorted(s, reverse=True)]))


def _toffoli_cost(gates: Sequence[GateOp]) -> int:
    cost = 0
    for g in gates:
        if g.kind in (C.CCZ, C.TOFFOLI):
            cost += 1
        elif g.kind == C.MCX:
            k = len(g.controls)
            cost += 0 if k == 1 else 2 * (k - 1)
    return cost


def build_oracle(n: int, marked: Sequence[str], reduce: bool = False) -> list[GateOp]:
    literal: list[GateOp] = []
    for w in marked:
        literal += marked_phase_literal(n, w, compact=reduce)
    if not reduce:
        return literal
    synthesized: list[GateOp] = []
    for mono in anf_monomials(n, marked):
        synthesized += phase_gate(mono, compact=True)
    # the reduced form is kept only when it does not cost more Toffolis
    if (_toffoli_cost(synthesized), len(synthesized)) <= (_toffoli_cost(literal), len(literal)):
        return synthesized
    return literal


def build_diffusion(n: int, reduce: bool = False) -> list[GateOp]:
    hs = [gate(C.H, q) for q in range(n)]
    xs = [gate(C.X, q) for q in range(n)]
    return hs + xs + phase_gate(range(n), compact=reduce) + xs + hs


def build_grover(spec: GroverSpec) -> CircuitIR:
    gates: list[GateOp] = []
    if spec.prep_gates:
        gates += [gate(C.H, q) for q in range(spec.n)]
    oracle = build_oracle(spec.n, spec.marked, spec.reduce)
    diffusion = build_diffusion(spec.n, spec.reduce)
    for _ in range(spec.rounds):
        gates += oracle + diffusion
    return CircuitIR(
        num_qubits=spec.n,
        gates=tuple(gates),
        level=C.EXTENDED,
        prep=C.PREP_ZERO if spec.prep_gates else C.PREP_UNIFORM,
    )


# --- lowering ------------------------------------------------------------------


def toffoli_network(c0: int, c1: int, t: int) -> list[GateOp]:
    """15-gate Clifford+T Toffoli: 2 H, 6 CNOT, 7 T/T†."""
    return [
        gate(C.H, t),
        gate(C.CNOT, c1, t),
        gate(C.TDG, t),
        gate(C.CNOT, c0, t),
        gate(C.T, t),
        gate(C.CNOT, c1, t),
        gate(C.TDG, t),
        gate(C.CNOT, c0, t),
        gate(C.T, c1),
        gate(C.T, t),
        gate(C.H, t),
        gate(C.CNOT, c0, c1),
        gate(C.T, c0),
        gate(C.TDG, c1),
        gate(C.CNOT, c0, c1),
    ]


def mcx_ladder(controls: Sequence[int], target: int, ancillas: Sequence[int]) -> list[GateOp]:
    """MCX with k >= 2 controls from 2(k-1) Toffolis on k-1 clean ancillas.

    Compute the AND of all controls into the last ancilla, CNOT it onto the
    target, then uncompute so every ancilla returns to |0>.  Gates returned
    are TOFFOLI/CNOT (not yet expanded).
    """
    k = len(controls)
    if k < 2:
        raise ValueError("the ladder needs at least two controls")
    if len(ancillas) < k - 1:
        raise ValueError(f"{k} controls need {k - 1} ancillas, got {len(ancillas)}")
    anc = list(ancillas[: k - 1])
    compute = [gate(C.TOFFOLI, controls[0], controls[1], anc[0])]
    for j in range(2, k):
        compute.append(gate(C.TOFFOLI, controls[j], anc[j - 2], anc[j - 1]))
    return compute + [gate(C.CNOT, anc[-1], target)] + compute[::-1]


@dataclass(frozen=True)
class LoweringReport:
    toffoli_count: int
    t_count: int
    ancilla_count: int
    total_gate_count: int

    def as_dict(self) -> dict:
        return {
            "toffoli_count": self.toffoli_count,
            "t_count": self.t_count,
            "ancilla_count": self.ancilla_count,
            "total_gate_count": self.total_gate_count,
        }

    def table(self) -> str:
        rows = [
            ("Toffolis", self.toffoli_count),
            ("T/T† gates (M)", self.t_count),
            ("ancillas", self.ancilla_count),
            ("gates (l)", self.total_gate_count),
        ]
        return "\n".join(f"{k:<16}{v:>8}" for k, v in rows)


def lower_to_clifford_t(circuit: CircuitIR) -> tuple[CircuitIR, LoweringReport]:
    """Expand CZ, CCZ, TOFFOLI and MCX into the lowered gate set.

    MCX ancillas are appended after the existing register and shared between
    blocks, since every ladder leaves them in |0>.
    """
    base = circuit.width
    extra = 0
    toffolis = 0
    out: list[GateOp] = []

    for g in circuit.gates:
        kind, qs = g.kind, g.qubits
        if kind in C.LOWERED_KINDS:
            out.append(g)
        elif kind == C.CZ:
            c, t = qs
            out += [gate(C.H, t), gate(C.CNOT, c, t), gate(C.H, t)]
        elif kind == C.CCZ:
            c0, c1, t = qs
            out += [gate(C.H, t), *toffoli_network(c0, c1, t), gate(C.H, t)]
            toffolis += 1
        elif kind == C.TOFFOLI:
            out += toffoli_network(*qs)
            toffolis += 1
        elif kind == C.MCX:
            controls, t = g.controls, g.target
            if len(controls) == 1:
                out.append(gate(C.CNOT, controls[0], t))
                continue
            need = len(controls) - 1
            extra = max(extra, need)
            for step in mcx_ladder(controls, t, range(base, base + need)):
                if step.kind == C.TOFFOLI:
                    out += toffoli_network(*step.qubits)
                    toffolis += 1
                else:
                    out.append(step)
        else:
            raise ValueError(f"no lowering rule for {kind!r}")

    lowered = CircuitIR(
        num_qubits=circuit.num_qubits,
        num_ancillas=circuit.num_ancillas + extra,
        gates=tuple(out),
        level=C.LOWERED,
        prep=circuit.prep,
    )
    report = LoweringReport(
        toffoli_count=toffolis,
        t_count=C.count_kinds(out, C.T_KINDS),
        ancilla_count=lowered.num_ancillas,
        total_gate_count=len(out),
    )
    return lowered, report


# --- the 3-qubit experiment ------------------------------------------------------


FIXTURE_MARKED = ("011", "101")


def fixture_circuit() -> CircuitIR:
    """The 35-gate circuit evaluated homomorphically in the n=3, m=2 experiment.

    Oracle CZ(q2,q0) CZ(q1,q0); diffusion with its CCZ as an H-conjugated
    Toffoli on controls q2, q1 and target q0.  G[1] = H_0, G[2] = CNOT_{2,0},
    G[33..35] = H_0, H_1, H_2.  The register starts in the uniform state the
    client prepares before encrypting.
    """
    g = [gate(C.H, 0), gate(C.CNOT, 2, 0), gate(C.H, 0)]
    g += [gate(C.H, 0), gate(C.CNOT, 1, 0), gate(C.H, 0)]
    g += [gate(C.H, q) for q in range(3)] + [gate(C.X, q) for q in range(3)]
    g += [gate(C.H, 0), *toffoli_network(2, 1, 0), gate(C.H, 0)]
    g += [gate(C.X, q) for q in range(3)] + [gate(C.H, q) for q in range(3)]
    return CircuitIR(num_qubits=3, gates=tuple(g), level=C.LOWERED, prep=C.PREP_UNIFORM)
