"""Pauli keys and the key-update rules of homomorphic evaluation.

A qubit w encrypted under key bits (a(w), b(w)) holds X^a Z^b |psi>.  When
the server applies a Clifford gate the mask stays a Pauli and only the key
bits move; when it applies T or T† through gate teleportation the new key
also absorbs the two Bell-measurement bits.

The key-updating functions g_i and f_i are not stored as polynomials.  The
server emits a flat list of records, one per evaluated gate, and the client
evaluates any g_i or f_i by replaying the relevant slice of that list.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

from . import circuit as C


@dataclass(frozen=True)
class PauliKey:
    a: tuple[int, ...]
    b: tuple[int, ...]

    def __post_init__(self):
        a = tuple(int(x) & 1 for x in self.a)
        b = tuple(int(x) & 1 for x in self.b)
        if len(a) != len(b):
            raise ValueError(f"key halves differ in length: {len(a)} vs {len(b)}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def n(self) -> int:
        return len(self.a)

    @classmethod
    def zeros(cls, n: int) -> PauliKey:
        return cls((0,) * n, (0,) * n)

    @classmethod
    def from_strings(cls, a: str, b: str) -> PauliKey:
        """Bitstrings in qubit order a(0) a(1) ... a(n-1)."""
        return cls(tuple(int(c) for c in a), tuple(int(c) for c in b))

    def strings(self) -> tuple[str, str]:
        return "".join(map(str, self.a)), "".join(map(str, self.b))

    def pair(self, w: int) -> tuple[int, int]:
        return self.a[w], self.b[w]

    def padded(self, n: int) -> PauliKey:
        """Extend with (0, 0) pairs for qubits that were never encrypted."""
        if n < self.n:
            raise ValueError("cannot shrink a key")
        pad = (0,) * (n - self.n)
        return PauliKey(self.a + pad, self.b + pad)

    def truncated(self, n: int) -> PauliKey:
        return PauliKey(self.a[:n], self.b[:n])

    def __str__(self) -> str:
        a, b = self.strings()
        return f"({a},{b})"


def clifford_update(key: PauliKey, kind: str, qubits: Sequence[int]) -> PauliKey:
    """Key after the server applies a Clifford gate to the encrypted state."""
    qubits = tuple(qubits)
    for q in qubits:
        if not 0 <= q < key.n:
            raise IndexError(f"qubit {q} out of range for {key.n}-qubit key")
    arity = 2 if kind in (C.CNOT, C.SWAP) else 1
    if kind not in C.CLIFFORD_KINDS:
        raise ValueError(f"no key-update rule for gate kind {kind!r}")
    if len(qubits) != arity:
        raise ValueError(f"{kind} expects {arity} qubit(s), got {len(qubits)}")

    a, b = list(key.a), list(key.b)
    if kind in (C.X, C.Z):
        pass
    elif kind == C.H:
        w = qubits[0]
        a[w], b[w] = b[w], a[w]
    elif kind in (C.S, C.SDG):
        w = qubits[0]
        b[w] ^= a[w]
    elif kind == C.CNOT:
        c, t = qubits
        b[c] ^= b[t]
        a[t] ^= a[c]
    else:  # SWAP
        p, q = qubits
        a[p], a[q] = a[q], a[p]
        b[p], b[q] = b[q], b[p]
    return PauliKey(tuple(a), tuple(b))


def teleport_update(key: PauliKey, w: int, kind: str, r_a: int, r_b: int) -> PauliKey:
    """Key after a T or T† evaluated by gate teleportation with outcomes (r_a, r_b)."""
    if not 0 <= w < key.n:
        raise IndexError(f"qubit {w} out of range for {key.n}-qubit key")
    a, b = list(key.a), list(key.b)
    aw, bw = a[w], b[w]
    if kind == C.T:
        a[w], b[w] = aw ^ r_a, aw ^ bw ^ r_b
    elif kind == C.TDG:
        a[w], b[w] = aw ^ r_a, bw ^ r_b
    else:
        raise ValueError(f"teleport_update needs T or TDG, got {kind!r}")
    return PauliKey(tuple(a), tuple(b))


@dataclass(frozen=True)
class CliffordStep:
    kind: str
    qubits: tuple[int, ...]


@dataclass(frozen=True)
class TeleportStep:
    index: int  # 1-based teleport number i
    qubit: int  # w_i
    kind: str  # T or TDG


KeyUpdateRecord = Union[CliffordStep, TeleportStep]


@dataclass(frozen=True)
class KeyUpdateProgram:
    """What the server sends back in place of the functions {g_i} and {f_i}."""

    n: int
    records: tuple[KeyUpdateRecord, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "records", tuple(self.records))
        expected = 1
        for r in self.records:
            if isinstance(r, TeleportStep):
                if r.index != expected:
                    raise ValueError(f"teleport step {r.index} out of order, expected {expected}")
                expected += 1

    @property
    def M(self) -> int:
        return sum(1 for r in self.records if isinstance(r, TeleportStep))

    def segments(self) -> list[tuple[list[CliffordStep], TeleportStep | None]]:
        """Split into M+1 pieces: the Clifford run before each teleport, and the tail."""
        out: list[tuple[list[CliffordStep], TeleportStep | None]] = []
        run: list[CliffordStep] = []
        for r in self.records:
            if isinstance(r, TeleportStep):
                out.append((run, r))
                run = []
            else:
                run.append(r)
        out.append((run, None))
        return out

    def to_records(self) -> list[list]:
        rows: list[list] = []
        for r in self.records:
            if isinstance(r, TeleportStep):
                rows.append(["teleport", r.index, r.qubit, r.kind])
            else:
                rows.append([r.kind, *r.qubits])
        return rows

    @classmethod
    def from_records(cls, n: int, rows: Iterable[Sequence]) -> KeyUpdateProgram:
        recs: list[KeyUpdateRecord] = []
        for row in rows:
            if row[0] == "teleport":
                recs.append(TeleportStep(int(row[1]), int(row[2]), str(row[3])))
            else:
                recs.append(CliffordStep(str(row[0]), tuple(int(q) for q in row[1:])))
        return cls(n, tuple(recs))


def program_from_circuit(circuit: C.CircuitIR) -> KeyUpdateProgram:
    """The record list a server emits while evaluating a lowered circuit."""
    if circuit.level != C.LOWERED:
        raise ValueError("key-update programs need a lowered circuit")
    recs: list[KeyUpdateRecord] = []
    i = 0
    for g in circuit.gates:
        if g.kind in C.T_KINDS:
            i += 1
            recs.append(TeleportStep(i, g.qubits[0], g.kind))
        else:
            recs.append(CliffordStep(g.kind, g.qubits))
    return KeyUpdateProgram(circuit.width, tuple(recs))


def replay_cliffords(key: PauliKey, steps: Iterable[CliffordStep]) -> PauliKey:
    for s in steps:
        key = clifford_update(key, s.kind, s.qubits)
    return key


def _segment(program: KeyUpdateProgram, i: int):
    if not 1 <= i <= program.M:
        raise IndexError(f"teleport index {i} outside 1..{program.M}")
    return program.segments()[i - 1]


def g_i(program: KeyUpdateProgram, key_before: PauliKey, i: int) -> int:
    """a-bit of qubit w_i just before the i-th T/T†: the exponent of the S^a rotation.

    ``key_before`` is the key right after teleport i-1 (the secret key for i=1).
    """
    run, step = _segment(program, i)
    return replay_cliffords(key_before.padded(program.n), run).a[step.qubit]


def f_i(program: KeyUpdateProgram, key_before: PauliKey, i: int, r_a: int, r_b: int) -> PauliKey:
    """Key right after teleport i, from the key right after teleport i-1."""
    run, step = _segment(program, i)
    key = replay_cliffords(key_before.padded(program.n), run)
    return teleport_update(key, step.qubit, step.kind, r_a, r_b)


def f_final(program: KeyUpdateProgram, key_after_last: PauliKey) -> PauliKey:
    """f_{M+1}: apply the Clifford records after the last teleport."""
    run, _ = program.segments()[-1]
    return replay_cliffords(key_after_last.padded(program.n), run)


def replay_final_key(
    program: KeyUpdateProgram, sk: PauliKey, outcomes: Sequence[tuple[int, int]]
) -> PauliKey:
    if len(outcomes) != program.M:
        raise ValueError(f"program has {program.M} teleports, got {len(outcomes)} outcomes")
    key = sk.padded(program.n)
    for i, (r_a, r_b) in enumerate(outcomes, start=1):
        key = f_i(program, key, i, r_a, r_b)
    return f_final(program, key)


def key_trace(program: KeyUpdateProgram, sk: PauliKey, outcomes: Sequence[tuple[int, int]]):
    """Key after every record, together with the a-exponent used at each teleport."""
    key = sk.padded(program.n)
    keys, exponents = [key], []
    it = iter(outcomes)
    for r in program.records:
        if isinstance(r, TeleportStep):
            r_a, r_b = next(it)
            exponents.append(key.a[r.qubit])
            key = teleport_update(key, r.qubit, r.kind, r_a, r_b)
        else:
            key = clifford_update(key, r.kind, r.qubits)
        keys.append(key)
    return keys, exponents

