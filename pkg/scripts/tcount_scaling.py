"""Exact vs closed-form T counts of lowered Grover circuits, plus the log-star curve.

Writes a CSV when --csv is given; prints the table otherwise.
"""

import argparse
import csv

from qhegrover.analyze import format_table, resource_table


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--max-n", type=int, default=10)
    parser.add_argument("--m", type=int, default=1)
    parser.add_argument("--csv")
    args = parser.parse_args()

    rows = resource_table([2 ** n for n in range(3, args.max_n + 1)], m=args.m, adw=True)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=list(rows[0].as_dict()))
            w.writeheader()
            w.writerows(r.as_dict() for r in rows)
    print(format_table(rows))


if __name__ == "__main__":
    main()
