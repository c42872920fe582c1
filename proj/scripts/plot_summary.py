#!/usr/bin/env python3
# SPDX-License-Identifier: Apache-2.0
# Copyright (C) 2026 The dirichlet-omp authors
"""Plot mean NMSE (dB) per estimator from a domp *_summary.csv file."""

import argparse

import matplotlib.pyplot as plt
import numpy as np
import pandas as pd


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("summary", help="summary CSV written by domp sweep-*")
    parser.add_argument("--out", help="image file; shows a window when omitted")
    args = parser.parse_args()

    axis = "axis_value"
    with open(args.summary) as fh:
        for line in fh:
            if line.startswith("# axis="):
                axis = line.strip().split("=", 1)[1]
    df = pd.read_csv(args.summary, comment="#")

    fig, ax = plt.subplots()
    for name, group in df.groupby("estimator", sort=False):
        ax.errorbar(group["axis_value"], 10 * np.log10(group["mean_nmse"]),
                    yerr=10 / np.log(10) * group["stderr_nmse"] / group["mean_nmse"],
                    marker="o", capsize=3, label=name)
    ax.set_xlabel(axis)
    ax.set_ylabel("NMSE (dB)")
    ax.grid(True, alpha=0.3)
    ax.legend()
    if args.out:
        fig.savefig(args.out, dpi=150, bbox_inches="tight")
    else:
        plt.show()


if __name__ == "__main__":
    main()
