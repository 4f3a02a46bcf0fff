"""Command-line front end: build, transpile, tcount, run, verify."""

from __future__ import annotations

import argparse
import json
import sys
from collections import Counter
from dataclasses import dataclass

import numpy as np

from . import analyze, grover, qhe
from . import circuit as C
from .keys import PauliKey
from .statevec import StateVector, fidelity, initial_state, sample_counts, simulate

HUMAN, MACHINE = "human", "machine"


@dataclass
class RunConfig:
    subcommand: str
    n: int | None = None
    marked: tuple[str, ...] = ()
    iterations: int | None = None
    shots: int = 1
    seed: int = 0
    mode: str = "plain"
    input: str | None = None
    output: str | None = None
    format: str = HUMAN

    def __post_init__(self):
        if self.shots < 1:
            raise ValueError("shots must be >= 1")


def shot_seed(seed: int, shot: int) -> int:
    """Independent per-shot seed derived from the run seed."""
    return int(np.random.SeedSequence([seed, shot]).generate_state(1, np.uint64)[0])


def _marked(text: str) -> tuple[str, ...]:
    return tuple(w.strip() for w in text.split(",") if w.strip())


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        print(text)


def _histogram(counts: dict[str, int], width: int = 40) -> str:
    total = sum(counts.values())
    top = max(counts.values())
    lines = []
    for key, c in sorted(counts.items()):
        bar = "#" * max(1, round(width * c / top))
        lines.append(f"{key}  {c:>7}  {c / total:7.4f}  {bar}")
    return "\n".join(lines)


def _spec_from_args(args) -> grover.GroverSpec:
    if args.n is None or not args.marked:
        raise ValueError("need --n and --marked (or --circuit)")
    return grover.GroverSpec(
        n=args.n,
        marked=_marked(args.marked),
        iterations=args.iterations,
        reduce=args.reduce,
        prep_gates=args.prep_gates,
    )


def _circuit_from_args(args, lower: bool) -> C.CircuitIR:
    if getattr(args, "circuit", None):
        circ = C.load(args.circuit)
    else:
        circ = grover.build_grover(_spec_from_args(args))
    if lower and circ.level != C.LOWERED:
        circ, _ = grover.lower_to_clifford_t(circ)
    return circ


# --- subcommands -----------------------------------------------------------------


def _report_comment(report: grover.LoweringReport) -> str:
    return "\n".join("# " + line for line in report.table().splitlines())


def cmd_build(args) -> int:
    spec = _spec_from_args(args)
    circ = grover.build_grover(spec)
    report = None
    if args.lower:
        circ, report = grover.lower_to_clifford_t(circ)
    comment = f"Grover n={spec.n} marked={','.join(spec.marked)} R={spec.rounds}"
    text = C.dumps(circ, comment)
    if args.output:
        C.save(circ, args.output, comment)
    if args.format == MACHINE:
        summary = report.as_dict() if report else {"total_gate_count": len(circ)}
        print(json.dumps({"output": args.output, "level": circ.level, **summary}, sort_keys=True))
        if not args.output:
            print(text, end="")
        return 0
    if not args.output:
        print(text, end="")
    if report:
        print(_report_comment(report))
    return 0


def cmd_transpile(args) -> int:
    lowered, report = grover.lower_to_clifford_t(C.load(args.input))
    if args.output:
        C.save(lowered, args.output)
    else:
        print(C.dumps(lowered), end="")
    if args.format == MACHINE:
        print(json.dumps(report.as_dict(), sort_keys=True))
    else:
        print(_report_comment(report))
    return 0


def cmd_tcount(args) -> int:
    if args.N:
        Ns = [int(x) for x in args.N.split(",")]
    else:
        Ns = []
        N = args.N_min
        while N <= args.N_max:
            Ns.append(N)
            N *= 2
    for N in Ns:
        analyze.closed_form_t(N, args.m)  # validates N before any building
    rows = analyze.resource_table(Ns, args.m, adw=args.adw)
    if args.format == MACHINE:
        print(json.dumps([r.as_dict() for r in rows], sort_keys=True))
    else:
        print(analyze.format_table(rows))
    return 0


_TABLE_HEAD = (
    "Simulation result",
    "Sa-rotated Bell measurements",
    "Encrypted result",
    "Final keys q_{n-1}..q_0",
    "Decrypted result",
)


def _table_row(t: qhe.ProtocolTranscript) -> str:
    keys = " ".join(t.key_column(w) for w in reversed(range(t.n)))
    return " | ".join([t.simulation_result, t.bell_bits or "-", t.encrypted_result, keys, t.decrypted_result])


def _parse_sk(text: str) -> PauliKey:
    a, b = text.split(",")
    return PauliKey.from_strings(a.strip(), b.strip())


def cmd_run(args) -> int:
    circ = _circuit_from_args(args, lower=args.mode != "plain")
    n = circ.num_qubits
    if args.mode == "plain":
        state = simulate(circ)
        counts = sample_counts(state, range(n), args.shots, np.random.default_rng(args.seed))
        if args.format == MACHINE:
            out = {"mode": "plain", "seed": args.seed, "shots": args.shots, "counts": counts,
                   "circuit_digest": circ.digest()}
            _emit(json.dumps(out, sort_keys=True), args.output)
        else:
            _emit(f"plain run, {args.shots} shots, seed {args.seed}\n" + _histogram(counts), args.output)
        return 0

    mode = qhe.FAITHFUL if args.mode == "qhe-faithful" else qhe.EAGER
    sk = _parse_sk(args.sk) if args.sk else None
    M = len(circ.t_positions())
    forced_outcomes = forced_result = None
    if args.force_outcomes:
        bits = args.force_outcomes.strip()
        if len(bits) == 2 * M + n:
            bits, forced_result = bits[: 2 * M], bits[2 * M:]
        elif len(bits) != 2 * M:
            raise ValueError(f"--force-outcomes needs {2 * M} or {2 * M + n} bits, got {len(bits)}")
        forced_outcomes = qhe.parse_bell_string(bits)

    transcripts = []
    for shot in range(args.shots):
        res = qhe.run_protocol(
            circ,
            seed=shot_seed(args.seed, shot),
            mode=mode,
            sk=sk,
            forced_outcomes=forced_outcomes,
            forced_result=forced_result,
        )
        transcripts.append(res.transcript)
    counts = dict(sorted(Counter(t.decrypted_result for t in transcripts).items()))

    if args.transcripts:
        with open(args.transcripts, "w") as fh:
            for t in transcripts:
                fh.write(t.to_json() + "\n")
    if args.format == MACHINE:
        out = {"mode": args.mode, "seed": args.seed, "shots": args.shots, "counts": counts,
               "transcripts": [t.to_dict() for t in transcripts]}
        _emit(json.dumps(out, sort_keys=True), args.output)
    else:
        lines = [f"{args.mode} run, {args.shots} shots, seed {args.seed}, M={M}", " | ".join(_TABLE_HEAD)]
        lines += [_table_row(t) for t in transcripts]
        lines += ["", "decrypted results:", _histogram(counts)]
        _emit("\n".join(lines), args.output)
    return 0


def verify_random_circuits(count: int, max_n: int, max_gates: int, seed: int, mode: str = qhe.EAGER):
    """Worst fidelity between homomorphic and plain runs over random lowered circuits."""
    rng = np.random.default_rng(seed)
    worst = 1.0
    for k in range(count):
        n = int(rng.integers(1, max_n + 1))
        length = int(rng.integers(1, max_gates + 1))
        circ = C.random_lowered_circuit(n, length, rng, t_fraction=float(rng.uniform(0.1, 0.6)))
        psi = StateVector.random(n, rng)
        decrypted, _ = qhe.run_protocol_state(circ, psi, seed=shot_seed(seed, k), mode=mode)
        worst = min(worst, fidelity(decrypted, simulate(circ, psi)))
    return worst


def cmd_verify(args) -> int:
    if args.circuit:
        circ = _circuit_from_args(args, lower=True)
        worst = 1.0
        for shot in range(args.shots):
            psi = initial_state(circ)
            dec, _ = qhe.run_protocol_state(circ, psi, seed=shot_seed(args.seed, shot))
            worst = min(worst, fidelity(dec, simulate(circ, psi)))
        checked = args.shots
    else:
        worst = verify_random_circuits(args.circuits, args.max_n, args.max_gates, args.seed)
        checked = args.circuits
    ok = worst >= 1 - args.tolerance
    if args.format == MACHINE:
        print(json.dumps({"checked": checked, "min_fidelity": worst, "ok": ok, "seed": args.seed}, sort_keys=True))
    else:
        print(f"{'PASS' if ok else 'FAIL'}: {checked} homomorphic runs, min fidelity {worst:.15f}")
    return 0 if ok else 1


# --- parser ------------------------------------------------------------------------


def _grover_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int, help="number of data qubits")
    p.add_argument("--marked", help="comma-separated marked strings, q_{n-1}..q_0")
    p.add_argument("--iterations", type=int, default=None, help="Grover rounds (default floor(pi/4 sqrt(N/m)))")
    p.add_argument("--reduce", action=argparse.BooleanOptionalAction, default=True,
                   help="drop redundant oracle controls and use CZ/CCZ where possible")
    p.add_argument("--prep-gates", action="store_true",
                   help="emit the initial H layer as gates instead of a uniform-prep header")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qhe-grover", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("build", help="build a Grover circuit")
    _grover_args(p)
    p.add_argument("--lower", action="store_true", help="lower to the Clifford+T gate set")
    p.add_argument("-o", "--output")
    p.add_argument("--format", choices=(HUMAN, MACHINE), default=HUMAN)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("transpile", help="lower a circuit file to Clifford+T")
    p.add_argument("input")
    p.add_argument("-o", "--output")
    p.add_argument("--format", choices=(HUMAN, MACHINE), default=HUMAN)
    p.set_defaults(func=cmd_transpile)

    p = sub.add_parser("tcount", help="T/T† resource table for Grover")
    p.add_argument("--N", help="comma-separated list sizes")
    p.add_argument("--N-min", type=int, default=8)
    p.add_argument("--N-max", type=int, default=1024)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--adw", action="store_true", help="add the log-star gate estimate column")
    p.add_argument("--format", choices=(HUMAN, MACHINE), default=HUMAN)
    p.set_defaults(func=cmd_tcount)

    p = sub.add_parser("run", help="run a circuit plainly or homomorphically")
    _grover_args(p)
    p.add_argument("--circuit", help="circuit file (instead of build parameters)")
    p.add_argument("--mode", choices=("plain", "qhe", "qhe-faithful"), default="plain")
    p.add_argument("--shots", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sk", help="inject the secret key as A,B bitstrings in order q0..q_{n-1}")
    p.add_argument("--force-outcomes",
                   help="postselect Bell bits (2M) or a full simulation result (2M+n bits)")
    p.add_argument("--transcripts", help="write one JSON transcript per shot to this file")
    p.add_argument("-o", "--output")
    p.add_argument("--format", choices=(HUMAN, MACHINE), default=HUMAN)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("verify", help="homomorphic-vs-plain fidelity harness")
    _grover_args(p)
    p.add_argument("--circuit")
    p.add_argument("--circuits", type=int, default=200)
    p.add_argument("--max-n", type=int, default=4)
    p.add_argument("--max-gates", type=int, default=25)
    p.add_argument("--shots", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tolerance", type=float, default=1e-9)
    p.add_argument("--format", choices=(HUMAN, MACHINE), default=HUMAN)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        RunConfig(
            subcommand=args.subcommand,
            n=getattr(args, "n", None),
            marked=_marked(getattr(args, "marked", None) or ""),
            iterations=getattr(args, "iterations", None),
            shots=getattr(args, "shots", 1),
            seed=getattr(args, "seed", 0),
            mode=getattr(args, "mode", "plain"),
            input=getattr(args, "input", None) or getattr(args, "circuit", None),
            output=getattr(args, "output", None),
            format=args.format,
        )
        return args.func(args)
    except (ValueError, IndexError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
