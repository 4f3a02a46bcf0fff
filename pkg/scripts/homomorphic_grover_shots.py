"""Many encrypted shots of the two-marked-item search; the split tends to 50/50."""

import argparse
import math
from collections import Counter

from qhegrover.cli import shot_seed
from qhegrover.grover import fixture_circuit
from qhegrover.qhe import EAGER, FAITHFUL, run_protocol


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--shots", type=int, nargs="+", default=[10, 100, 1000, 5000])
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--faithful", action="store_true", help="2M pair qubits, postponed measurements")
    args = parser.parse_args()

    circ = fixture_circuit()
    mode = FAITHFUL if args.faithful else EAGER
    print(f"{'shots':>7} {'011':>7} {'101':>7} {'other':>6} {'frac 011':>9} {'z':>6}")
    for shots in args.shots:
        c = Counter(run_protocol(circ, seed=shot_seed(args.seed, s), mode=mode).transcript.decrypted_result
                    for s in range(shots))
        other = shots - c["011"] - c["101"]
        z = (c["011"] - shots / 2) / math.sqrt(shots / 4)
        print(f"{shots:>7} {c['011']:>7} {c['101']:>7} {other:>6} {c['011'] / shots:>9.3f} {z:>+6.2f}")


if __name__ == "__main__":
    main()
