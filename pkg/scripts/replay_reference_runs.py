"""Replay the ten reference 3-qubit transcripts under sk = (111, 111).

Each simulation record is postselected into a real run of the 35-gate
circuit, so a row only reproduces if it is physically possible, and the
final keys are then recomputed by the client-side replay.
"""

import argparse

from qhegrover.grover import fixture_circuit
from qhegrover.keys import PauliKey
from qhegrover.qhe import parse_bell_string, run_protocol

ROWS = [
    "00101000010010001", "00110111010111100", "01000000110110111", "01001001001011010",
    "01011110010010010", "01101101101101011", "10000010010001100", "10101101111001111",
    "10110110010110011", "10111001100000011",
]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--pair-order", choices=("ab", "ba"), default="ab",
                        help="which Bell bit of each pair is printed first")
    args = parser.parse_args()

    sk = PauliKey.from_strings("111", "111")
    circ = fixture_circuit()
    print(f"{'simulation result':<19}{'bell':<16}{'enc':<5}{'q2':<7}{'q1':<7}{'q0':<7}dec")
    for sim in ROWS:
        outs = parse_bell_string(sim[:14], pair_order=args.pair_order)
        try:
            t = run_protocol(circ, seed=0, sk=sk, forced_outcomes=outs, forced_result=sim[14:]).transcript
        except ValueError as exc:
            print(f"{sim:<19}impossible under this convention ({exc})")
            continue
        keys = "".join(f"{t.key_column(w):<7}" for w in (2, 1, 0))
        print(f"{sim:<19}{sim[:14]:<16}{sim[14:]:<5}{keys}{t.decrypted_result}")


if __name__ == "__main__":
    main()
