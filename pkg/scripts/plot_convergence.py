"""Plot a convergence CSV written by ``cresa converge``.

    python3 scripts/plot_convergence.py results/sum3/convergence.csv [--out fig.png] [--reference 2.0]

One line per (grid, target): mean over repeats with a min-max band.
Needs matplotlib (``pip install -e .[plot]``).
"""
from __future__ import annotations

import argparse
import csv
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def main() -> None:
    parser = argparse.ArgumentParser(description="plot estimator convergence")
    parser.add_argument("csv")
    parser.add_argument("--out", default="convergence.png")
    parser.add_argument("--reference", type=float, help="draw the exact value as a dashed line")
    args = parser.parse_args()

    series = defaultdict(list)
    with open(args.csv, newline="") as fh:
        for row in csv.DictReader(fh):
            if row["quantity"] == "conditional_cre_2":
                key = f"{row['target']}  I={row['I']} J={row['J']}"
            elif row["quantity"] == "cre":
                key = row["target"]
            else:
                key = f"{row['target']}  m={row['m']}"
            series[key].append(tuple(float(row[c]) for c in ("size", "mean", "min", "max")))

    fig, ax = plt.subplots(figsize=(6, 4))
    for key, pts in series.items():
        size, mean, lo, hi = zip(*sorted(pts))
        (line,) = ax.plot(size, mean, marker="o", label=key)
        ax.fill_between(size, lo, hi, color=line.get_color(), alpha=0.15)
    if args.reference is not None:
        ax.axhline(args.reference, color="k", ls="--", lw=1)
    ax.set_xscale("log")
    ax.set_xlabel("sample size N")
    ax.set_ylabel("estimate")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(args.out, dpi=150)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
