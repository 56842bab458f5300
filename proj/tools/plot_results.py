#!/usr/bin/env python3
"""Plot mean normalized SHD from `polytree experiment` CSV output."""

import argparse

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd


def best_rows(df):
    # One row per (algorithm, cell): the threshold with the lowest mean SHD.
    keys = ["algorithm", "p", "n", "K", "errorFamily", "gaussFraction"]
    df = df.dropna(subset=["shd"]).copy()
    df["threshold"] = df["threshold"].fillna(-1.0)
    means = df.groupby(keys + ["threshold"], as_index=False)["shd"].mean()
    idx = means.groupby(keys)["shd"].idxmin()
    return means.loc[idx].reset_index(drop=True)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("csv", help="results CSV written by polytree experiment")
    parser.add_argument("--x", choices=["ratio", "gaussFraction"], default="ratio")
    parser.add_argument("--output", default="shd.png")
    args = parser.parse_args()

    df = pd.read_csv(args.csv, comment="#")
    best = best_rows(df)
    best["ratio"] = best["n"] / best["p"]

    panels = sorted(best["p"].unique())
    fig, axes = plt.subplots(1, len(panels), figsize=(4 * len(panels), 3.5), squeeze=False, sharey=True)
    for ax, p in zip(axes[0], panels):
        for algorithm, group in best[best["p"] == p].groupby("algorithm"):
            group = group.sort_values(args.x)
            ax.plot(group[args.x], group["shd"], marker="o", label=algorithm)
        if args.x == "ratio":
            ax.set_xscale("log")
        ax.set_title(f"p = {p}")
        ax.set_xlabel("n / p" if args.x == "ratio" else "Gaussian fraction")
    axes[0][0].set_ylabel("mean normalized SHD")
    axes[0][-1].legend()
    fig.tight_layout()
    fig.savefig(args.output, dpi=150)


if __name__ == "__main__":
    main()
