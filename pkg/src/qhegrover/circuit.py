"""Gate and circuit containers plus the plain-text circuit format.

A circuit file looks like::

    # Grover n=3, marked 011,101
    qubits 3
    ancillas 0
    level lowered
    prep uniform
    H 0
    CNOT 2 0
    ...

Header lines come first, in any order, each ``key value``.  ``qubits`` is
required; ``ancillas`` defaults to 0, ``level`` to ``extended`` and ``prep``
to ``zero``.  Every following non-blank, non-comment line is one gate: the
kind then its qubit indices, controls first and target last (``CNOT 2 0``
is control q2, target q0).  ``#`` starts a comment anywhere on a line.

``prep`` names the state of the data register before gate 1: ``zero`` is
|0...0>, ``uniform`` is H^n|0...0> (the Grover starting state the client
prepares before encrypting).  Ancillas always start in |0>.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Iterable, Sequence

X, Z, H, S, SDG, T, TDG = "X", "Z", "H", "S", "SDG", "T", "TDG"
CNOT, SWAP, CZ, CCZ, TOFFOLI, MCX = "CNOT", "SWAP", "CZ", "CCZ", "TOFFOLI", "MCX"

SINGLE_QUBIT_KINDS = frozenset({X, Z, H, S, SDG, T, TDG})
TWO_QUBIT_KINDS = frozenset({CNOT, SWAP, CZ})
THREE_QUBIT_KINDS = frozenset({CCZ, TOFFOLI})
ALL_KINDS = SINGLE_QUBIT_KINDS | TWO_QUBIT_KINDS | THREE_QUBIT_KINDS | {MCX}

LOWERED_KINDS = frozenset({X, Z, H, S, SDG, T, TDG, CNOT, SWAP})
CLIFFORD_KINDS = frozenset({X, Z, H, S, SDG, CNOT, SWAP})
T_KINDS = frozenset({T, TDG})

EXTENDED, LOWERED = "extended", "lowered"
PREP_ZERO, PREP_UNIFORM = "zero", "uniform"

# Accepted spellings when parsing; output always uses the canonical names.
_ALIASES = {
    "S†": SDG, "SDAG": SDG, "T†": TDG, "TDAG": TDG,
    "CX": CNOT, "CCX": TOFFOLI, "MCNOT": MCX,
}


class CircuitError(ValueError):
    """Malformed gate, circuit or circuit file."""


@dataclass(frozen=True)
class GateOp:
    kind: str
    qubits: tuple[int, ...]

    def __post_init__(self):
        kind = _ALIASES.get(self.kind.upper(), self.kind.upper())
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        if kind not in ALL_KINDS:
            raise CircuitError(f"unknown gate kind {self.kind!r}")
        k = len(self.qubits)
        if kind in SINGLE_QUBIT_KINDS:
            ok = k == 1
        elif kind in TWO_QUBIT_KINDS:
            ok = k == 2
        elif kind in THREE_QUBIT_KINDS:
            ok = k == 3
        else:
            ok = k >= 2
        if not ok:
            raise CircuitError(f"{kind} cannot act on {k} qubit(s)")
        if len(set(self.qubits)) != k:
            raise CircuitError(f"{kind} has repeated qubits {self.qubits}")
        if min(self.qubits) < 0:
            raise CircuitError(f"negative qubit index in {self}")

    @property
    def target(self) -> int:
        return self.qubits[-1]

    @property
    def controls(self) -> tuple[int, ...]:
        return self.qubits[:-1]

    def __str__(self) -> str:
        return " ".join([self.kind, *map(str, self.qubits)])


def gate(kind: str, *qubits: int) -> GateOp:
    return GateOp(kind, tuple(qubits))


@dataclass(frozen=True)
class CircuitIR:
    """Ordered gate list; ``gates[j - 1]`` is gate G[j] in 1-based numbering."""

    num_qubits: int
    gates: tuple[GateOp, ...] = ()
    num_ancillas: int = 0
    level: str = EXTENDED
    prep: str = PREP_ZERO

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        if self.num_qubits < 1:
            raise CircuitError("a circuit needs at least one data qubit")
        if self.num_ancillas < 0:
            raise CircuitError("negative ancilla count")
        if self.level not in (EXTENDED, LOWERED):
            raise CircuitError(f"unknown level {self.level!r}")
        if self.prep not in (PREP_ZERO, PREP_UNIFORM):
            raise CircuitError(f"unknown prep {self.prep!r}")
        width = self.width
        for j, g in enumerate(self.gates, start=1):
            if max(g.qubits) >= width:
                raise CircuitError(f"G[{j}] = {g} exceeds register width {width}")
            if self.level == LOWERED and g.kind not in LOWERED_KINDS:
                raise CircuitError(f"G[{j}] = {g} is not allowed at the lowered level")

    @property
    def width(self) -> int:
        return self.num_qubits + self.num_ancillas

    def __len__(self) -> int:
        return len(self.gates)

    def t_positions(self) -> list[int]:
        """1-indexed positions j_1 < ... < j_M of the T/T† gates."""
        return [j for j, g in enumerate(self.gates, start=1) if g.kind in T_KINDS]

    def digest(self) -> str:
        return hashlib.sha256(dumps(self).encode()).hexdigest()


def dumps(circuit: CircuitIR, comment: str | None = None) -> str:
    lines = []
    if comment:
        lines.extend(f"# {c}" for c in comment.splitlines())
    lines += [
        f"qubits {circuit.num_qubits}",
        f"ancillas {circuit.num_ancillas}",
        f"level {circuit.level}",
        f"prep {circuit.prep}",
    ]
    lines.extend(str(g) for g in circuit.gates)
    return "\n".join(lines) + "\n"


_HEADER_KEYS = ("qubits", "ancillas", "level", "prep")


def loads(text: str) -> CircuitIR:
    header: dict[str, str] = {}
    gates: list[GateOp] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split()
        if head.lower() in _HEADER_KEYS:
            if gates:
                raise CircuitError(f"line {lineno}: header {head!r} after gates")
            if len(rest) != 1:
                raise CircuitError(f"line {lineno}: expected '{head} <value>'")
            header[head.lower()] = rest[0]
            continue
        try:
            gates.append(GateOp(head, tuple(int(q) for q in rest)))
        except ValueError as exc:  # CircuitError is a ValueError too
            raise CircuitError(f"line {lineno}: {exc}") from None
    if "qubits" not in header:
        raise CircuitError("missing 'qubits' header")
    try:
        return CircuitIR(
            num_qubits=int(header["qubits"]),
            num_ancillas=int(header.get("ancillas", 0)),
            level=header.get("level", EXTENDED).lower(),
            prep=header.get("prep", PREP_ZERO).lower(),
            gates=tuple(gates),
        )
    except ValueError as exc:
        raise CircuitError(str(exc)) from None


def load(path) -> CircuitIR:
    with open(path) as fh:
        return loads(fh.read())


def save(circuit: CircuitIR, path, comment: str | None = None) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(circuit, comment))


def count_kinds(gates: Iterable[GateOp], kinds: Sequence[str] | frozenset[str]) -> int:
    return sum(1 for g in gates if g.kind in kinds)


def random_lowered_circuit(n: int, length: int, rng, t_fraction: float = 0.3) -> CircuitIR:
    """Random lowered circuit on n qubits; roughly ``t_fraction`` of gates are T/T†."""
    singles = [X, Z, H, S, SDG]
    gates = []
    for _ in range(length):
        u = rng.random()
        if u < t_fraction:
            kind = T if rng.random() < 0.5 else TDG
            gates.append(gate(kind, int(rng.integers(n))))
        elif n >= 2 and u < t_fraction + (1 - t_fraction) * 0.4:
            a, b = (int(q) for q in rng.choice(n, size=2, replace=False))
            gates.append(gate(CNOT if rng.random() < 0.8 else SWAP, a, b))
        else:
            gates.append(gate(singles[int(rng.integers(len(singles)))], int(rng.integers(n))))
    return CircuitIR(num_qubits=n, gates=tuple(gates), level=LOWERED)
