#!/usr/bin/env python3
"""Plot delta_s and O1..O3 from a `diagent sweep` table."""

import argparse
import csv

import matplotlib.pyplot as plt


def read_rows(path):
    with open(path) as f:
        lines = [l for l in f if not l.startswith("#")]
    return list(csv.DictReader(lines, delimiter="\t"))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("table")
    ap.add_argument("--n0", type=int)
    ap.add_argument("--logx", action="store_true")
    ap.add_argument("-o", "--output")
    args = ap.parse_args()

    rows = [r for r in read_rows(args.table) if r["delta_s"] != "nan"]
    if args.n0 is not None:
        rows = [r for r in rows if int(r["n0"]) == args.n0]
    x = [float(r["param"]) for r in rows]

    fig, ax = plt.subplots()
    ax.plot(x, [float(r["delta_s"]) for r in rows], "k-", label="ΔS")
    for col, style in (("O1", "b--"), ("O2", "g:"), ("O3", "r-.")):
        ax.plot(x, [float(r[col]) for r in rows], style, label=col)
    ax.axhline(1 - 0.5772156649, color="grey", lw=0.5)
    if args.logx:
        ax.set_xscale("log")
    ax.set_ylabel("ΔS")
    ax.legend()
    if args.output:
        fig.savefig(args.output, dpi=150)
    else:
        plt.show()


if __name__ == "__main__":
    main()
