"""Client/server roles of the QOTP + gate-teleportation homomorphic scheme.

Setup, key generation, encryption, evaluation and decryption run in one
process.  Only four payloads cross between the roles: the encrypted
register (client -> server), and the evaluated register, the EPR halves and
the key-update program (server -> client).  ``ServerState`` holds no key
material at all.

Two evaluation modes exist:

* eager: one EPR pair is created, consumed and reset for every T/T†, so the
  simulation needs only two extra qubits.  The client's rotated Bell
  measurement is carried out right after the server's SWAP, through a
  callback; since it touches only the pair qubits it commutes with all later
  server gates, so outcome statistics match the postponed order.
* faithful: 2M dedicated pair qubits, all measurements postponed until the
  server is done, exactly the message order of the protocol.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import circuit as C
from .circuit import CircuitIR
from .keys import KeyUpdateProgram, PauliKey, TeleportStep, CliffordStep, f_i, f_final, g_i
from .statevec import StateVector, apply_gate, apply_gates, initial_state, measure_qubit
from .teleport import (
    BellOutcome,
    EprPair,
    evaluate_t_gate,
    make_epr,
    reset_pair,
    rotated_bell_measure,
)

EAGER, FAITHFUL = "eager", "faithful"


def make_rng(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


# --- key generation, encryption -------------------------------------------


def keygen(n: int, rng: np.random.Generator) -> PauliKey:
    if n < 1:
        raise ValueError("key length must be positive")
    a = rng.integers(0, 2, size=n)
    b = rng.integers(0, 2, size=n)
    return PauliKey(tuple(a.tolist()), tuple(b.tolist()))


def encrypt(state: StateVector, sk: PauliKey) -> StateVector:
    """QOTP: X^a(w) Z^b(w) on each data qubit w < sk.n; higher qubits untouched."""
    if sk.n > state.num_qubits:
        raise ValueError(f"{sk.n}-qubit key for a {state.num_qubits}-qubit state")
    gates = []
    for w in range(sk.n):
        if sk.b[w]:
            gates.append(C.gate(C.Z, w))
        if sk.a[w]:
            gates.append(C.gate(C.X, w))
    return apply_gates(state, gates)


def decrypt_state(state: StateVector, key: PauliKey) -> StateVector:
    """Undo X^a Z^b on the first key.n qubits (inverse of ``encrypt``)."""
    if key.n > state.num_qubits:
        raise ValueError(f"{key.n}-qubit key for a {state.num_qubits}-qubit state")
    gates = []
    for w in range(key.n):
        if key.a[w]:
            gates.append(C.gate(C.X, w))
        if key.b[w]:
            gates.append(C.gate(C.Z, w))
    return apply_gates(state, gates)


def decrypt_bits(bits: str, key: PauliKey) -> str:
    """Classical decryption of a measured register: r_c XOR a_final.

    ``bits`` reads q_{n-1} ... q_0.
    """
    n = len(bits)
    if key.n < n:
        raise ValueError(f"{key.n}-qubit key for {n} measured bits")
    return "".join(str(int(bits[n - 1 - q]) ^ key.a[q]) for q in reversed(range(n)))


# --- roles ------------------------------------------------------------------


@dataclass
class ServerState:
    circuit: CircuitIR
    evaluated_upto: int = 0
    teleport_count: int = 0
    pairs: list[EprPair] = field(default_factory=list)

    def __post_init__(self):
        if self.circuit.level != C.LOWERED:
            raise ValueError("the server only evaluates lowered circuits")


Measurer = Callable[[int, EprPair, StateVector, KeyUpdateProgram], tuple[BellOutcome, StateVector]]


@dataclass
class ClientState:
    sk: PauliKey
    current_key: PauliKey
    pending_pairs: list[EprPair] = field(default_factory=list)
    received_program: KeyUpdateProgram | None = None

    @classmethod
    def new(cls, sk: PauliKey) -> ClientState:
        return cls(sk=sk, current_key=sk)

    def measure_pair(
        self,
        state: StateVector,
        pair: EprPair,
        i: int,
        program: KeyUpdateProgram,
        rng: np.random.Generator,
        force: tuple[int, int] | None = None,
    ) -> tuple[BellOutcome, StateVector]:
        """Decryption round i: choose S^a from g_i, measure, then advance the key by f_i."""
        a = g_i(program, self.current_key, i)
        out, state = rotated_bell_measure(state, pair.server, pair.client, a, rng, index=i, force=force)
        self.current_key = f_i(program, self.current_key, i, out.r_a, out.r_b)
        return out, state

    def measurer(
        self, rng: np.random.Generator, forced: Sequence[tuple[int, int]] | None = None
    ) -> Measurer:
        """Callback handed to an eager evaluation."""

        def measure(i, pair, state, program):
            force = None if forced is None else tuple(forced[i - 1])
            return self.measure_pair(state, pair, i, program, rng, force)

        return measure

    def measure_pending(
        self,
        state: StateVector,
        program: KeyUpdateProgram,
        rng: np.random.Generator,
        forced: Sequence[tuple[int, int]] | None = None,
    ) -> tuple[list[BellOutcome], StateVector]:
        """Postponed decryption rounds over all pairs, in teleport order."""
        if len(self.pending_pairs) != program.M:
            raise ValueError(f"{len(self.pending_pairs)} pairs for {program.M} teleports")
        outcomes = []
        for i, pair in enumerate(self.pending_pairs, start=1):
            force = None if forced is None else tuple(forced[i - 1])
            out, state = self.measure_pair(state, pair, i, program, rng, force)
            outcomes.append(out)
        self.pending_pairs = []
        return outcomes, state


def evaluate(
    server: ServerState,
    state: StateVector,
    rng: np.random.Generator | None = None,
    measurer: Measurer | None = None,
    mode: str = EAGER,
) -> tuple[StateVector, KeyUpdateProgram, list[BellOutcome]]:
    """Apply G[1..l] to the encrypted register.

    ``state`` spans the circuit width (data plus |0> ancillas); pair qubits
    are appended here.  Eager mode needs ``measurer`` (the client's callback)
    and an ``rng`` for the pair resets; faithful mode returns no outcomes and
    leaves the pairs listed in ``server.pairs``.
    """
    circuit = server.circuit
    width = circuit.width
    if state.num_qubits != width:
        raise ValueError(f"state has {state.num_qubits} qubits, circuit width is {width}")
    M = len(circuit.t_positions())
    if mode == EAGER:
        if measurer is None or rng is None:
            raise ValueError("eager evaluation needs the client's measurer and an rng")
        state = state.tensor_zeros(2) if M else state
        shared = EprPair(width, width + 1)
    elif mode == FAITHFUL:
        state = state.tensor_zeros(2 * M) if M else state
    else:
        raise ValueError(f"unknown evaluation mode {mode!r}")

    records = []
    outcomes: list[BellOutcome] = []
    server.pairs = []
    for j, g in enumerate(circuit.gates, start=1):
        if g.kind in C.T_KINDS:
            server.teleport_count += 1
            i = server.teleport_count
            pair = shared if mode == EAGER else EprPair(width + 2 * (i - 1), width + 2 * (i - 1) + 1)
            state = make_epr(state, pair.client, pair.server)
            state = evaluate_t_gate(state, g.qubits[0], pair, g.kind)
            records.append(TeleportStep(i, g.qubits[0], g.kind))
            server.pairs.append(pair)
            if mode == EAGER:
                prefix = KeyUpdateProgram(width, tuple(records))
                out, state = measurer(i, pair, state, prefix)
                outcomes.append(out)
                state = reset_pair(state, pair, rng)
        else:
            state = apply_gate(state, g)
            records.append(CliffordStep(g.kind, g.qubits))
        server.evaluated_upto = j
    return state, KeyUpdateProgram(width, tuple(records)), outcomes


def decrypt(
    client: ClientState,
    program: KeyUpdateProgram,
    outcomes: Sequence[BellOutcome | tuple[int, int]],
    encrypted_bits: str,
) -> tuple[PauliKey, str]:
    """Ordered replay from sk: returns the data-register final key and the plaintext bits."""
    if len(outcomes) != program.M:
        raise ValueError(f"program has {program.M} teleports, got {len(outcomes)} outcomes")
    client.received_program = program
    key = client.sk.padded(program.n)
    for i, out in enumerate(outcomes, start=1):
        r_a, r_b = out.bits if isinstance(out, BellOutcome) else out
        key = f_i(program, key, i, r_a, r_b)
    key = f_final(program, key)
    client.current_key = key
    final = key.truncated(client.sk.n)
    return final, decrypt_bits(encrypted_bits, final)


# --- transcripts ------------------------------------------------------------


def bell_string(outcomes: Sequence[tuple[int, int]]) -> str:
    """Last measurement first, each pair printed r_a r_b."""
    return "".join(f"{ra}{rb}" for ra, rb in reversed(list(outcomes)))


def parse_bell_string(bits: str, pair_order: str = "ab") -> list[tuple[int, int]]:
    """Inverse of ``bell_string``; ``pair_order='ba'`` reads each pair as r_b r_a."""
    if len(bits) % 2 or set(bits) - {"0", "1"}:
        raise ValueError(f"not a Bell-outcome bitstring: {bits!r}")
    pairs = [(int(bits[k]), int(bits[k + 1])) for k in range(0, len(bits), 2)]
    if pair_order == "ba":
        pairs = [(y, x) for x, y in pairs]
    elif pair_order != "ab":
        raise ValueError(f"pair_order must be 'ab' or 'ba', got {pair_order!r}")
    return pairs[::-1]


@dataclass
class ProtocolTranscript:
    n: int
    M: int
    sk: PauliKey
    circuit_digest: str
    bell_outcomes: list[tuple[int, int]]
    encrypted_result: str
    final_key: PauliKey
    decrypted_result: str
    seed: int | None = None
    mode: str = EAGER
    program: list[list] = field(default_factory=list)

    @property
    def bell_bits(self) -> str:
        return bell_string(self.bell_outcomes)

    @property
    def simulation_result(self) -> str:
        return self.bell_bits + self.encrypted_result

    def consistent(self) -> bool:
        return decrypt_bits(self.encrypted_result, self.final_key) == self.decrypted_result

    def key_column(self, w: int) -> str:
        return "({},{})".format(*self.final_key.pair(w))

    def to_dict(self) -> dict:
        a, b = self.sk.strings()
        fa, fb = self.final_key.strings()
        return {
            "n": self.n,
            "M": self.M,
            "seed": self.seed,
            "mode": self.mode,
            "circuit_digest": self.circuit_digest,
            "sk": {"a": a, "b": b},
            "bell_outcomes": self.bell_bits,
            "encrypted_result": self.encrypted_result,
            "final_key": {"a": fa, "b": fb},
            "decrypted_result": self.decrypted_result,
            "program": self.program,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> ProtocolTranscript:
        return cls(
            n=int(d["n"]),
            M=int(d["M"]),
            sk=PauliKey.from_strings(d["sk"]["a"], d["sk"]["b"]),
            circuit_digest=d["circuit_digest"],
            bell_outcomes=parse_bell_string(d["bell_outcomes"]),
            encrypted_result=d["encrypted_result"],
            final_key=PauliKey.from_strings(d["final_key"]["a"], d["final_key"]["b"]),
            decrypted_result=d["decrypted_result"],
            seed=d.get("seed"),
            mode=d.get("mode", EAGER),
            program=d.get("program", []),
        )

    @classmethod
    def from_json(cls, text: str) -> ProtocolTranscript:
        return cls.from_dict(json.loads(text))


# --- end to end --------------------------------------------------------------


@dataclass
class RunResult:
    transcript: ProtocolTranscript
    program: KeyUpdateProgram
    outcomes: list[BellOutcome]
    state: StateVector  # full register after evaluation and all Bell measurements


def _run(
    circuit: CircuitIR,
    input_state: StateVector | None,
    seed,
    mode: str,
    sk: PauliKey | None,
    forced_outcomes: Sequence[tuple[int, int]] | None,
) -> tuple[ClientState, RunResult, np.random.Generator]:
    if circuit.level != C.LOWERED:
        raise ValueError("run_protocol needs a lowered circuit")
    rng = make_rng(seed)
    n = circuit.num_qubits
    if input_state is None:
        input_state = initial_state(circuit)
    elif input_state.num_qubits == n and circuit.num_ancillas:
        input_state = input_state.tensor_zeros(circuit.num_ancillas)
    if input_state.num_qubits != circuit.width:
        raise ValueError(f"input has {input_state.num_qubits} qubits, circuit width is {circuit.width}")

    # Key Generation and Encryption (client)
    if sk is None:
        sk = keygen(n, rng)
    elif sk.n != n:
        raise ValueError(f"secret key covers {sk.n} qubits, register has {n}")
    client = ClientState.new(sk)
    encrypted = encrypt(input_state, sk)

    # Setup happens on demand inside evaluation; Evaluation (server)
    M = len(circuit.t_positions())
    if forced_outcomes is not None and len(forced_outcomes) != M:
        raise ValueError(f"circuit has {M} T/T† gates, got {len(forced_outcomes)} forced outcomes")
    server = ServerState(circuit)
    if mode == EAGER:
        state, program, outcomes = evaluate(
            server, encrypted, rng, client.measurer(rng, forced_outcomes), EAGER
        )
    else:
        state, program, _ = evaluate(server, encrypted, mode=FAITHFUL)
        client.pending_pairs = list(server.pairs)
        outcomes, state = client.measure_pending(state, program, rng, forced_outcomes)

    transcript = ProtocolTranscript(
        n=n,
        M=M,
        sk=sk,
        circuit_digest=circuit.digest(),
        bell_outcomes=[o.bits for o in outcomes],
        encrypted_result="",
        final_key=sk,
        decrypted_result="",
        seed=seed if isinstance(seed, (int, type(None))) else None,
        mode=mode,
        program=program.to_records(),
    )
    return client, RunResult(transcript, program, outcomes, state), rng


def run_protocol(
    circuit: CircuitIR,
    input_state: StateVector | None = None,
    seed=None,
    *,
    mode: str = EAGER,
    sk: PauliKey | None = None,
    forced_outcomes: Sequence[tuple[int, int]] | None = None,
    forced_result: str | None = None,
) -> RunResult:
    """Keygen, encrypt, evaluate, measure the data register, decrypt.

    ``input_state`` covers the data register (ancillas are appended in |0>)
    or the full circuit width; it defaults to the circuit's declared prep.
    ``forced_outcomes``/``forced_result`` postselect Bell outcomes and the
    encrypted measurement record (q_{n-1}..q_0) to replay a recorded run.
    """
    client, res, rng = _run(circuit, input_state, seed, mode, sk, forced_outcomes)
    n = circuit.num_qubits
    state = res.state
    bits = {}
    for q in range(n):
        force = None if forced_result is None else int(forced_result[n - 1 - q])
        bits[q], state = measure_qubit(state, q, rng, force)
    encrypted = "".join(str(bits[q]) for q in reversed(range(n)))
    final, plain = decrypt(client, res.program, res.outcomes, encrypted)
    t = res.transcript
    t.encrypted_result, t.final_key, t.decrypted_result = encrypted, final, plain
    res.state = state
    return res


def run_protocol_state(
    circuit: CircuitIR,
    input_state: StateVector | None = None,
    seed=None,
    *,
    mode: str = EAGER,
    sk: PauliKey | None = None,
) -> tuple[StateVector, RunResult]:
    """Variant that skips the data measurement and decrypts the quantum state.

    Returns the decrypted register restricted to the circuit width (data
    plus ancillas); pair qubits are in basis states after measurement.
    """
    from .statevec import restrict

    client, res, _ = _run(circuit, input_state, seed, mode, sk, None)
    final, _ = decrypt(client, res.program, res.outcomes, "0" * circuit.num_qubits)
    full_key = client.current_key  # covers ancillas too
    reduced = restrict(res.state, circuit.width)
    res.transcript.final_key = final
    return decrypt_state(reduced, full_key), res


# --- QOTP mixing -------------------------------------------------------------


def qotp_mixing_check(n: int, sigma: np.ndarray) -> float:
    """Max-norm distance between the key-averaged QOTP image of ``sigma`` and I/2^n."""
    dim = 1 << n
    sigma = np.asarray(sigma, dtype=complex)
    if sigma.shape != (dim, dim):
        raise ValueError(f"expected a {dim}x{dim} density matrix")
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    z = np.diag([1.0 + 0j, -1.0])
    masks = {(a, b): np.linalg.matrix_power(x, a) @ np.linalg.matrix_power(z, b) for a in (0, 1) for b in (0, 1)}
    acc = np.zeros_like(sigma)
    for a_bits in range(dim):
        for b_bits in range(dim):
            P = np.eye(1, dtype=complex)
            for w in reversed(range(n)):  # kron puts q_{n-1} first
                P = np.kron(P, masks[(a_bits >> w) & 1, (b_bits >> w) & 1])
            acc += P @ sigma @ P.conj().T
    acc /= 4 ** n
    return float(np.max(np.abs(acc - np.eye(dim) / dim)))
