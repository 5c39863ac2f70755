# Copyright 2026 The annet Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Plots the CSV files written by `annet benchmark fig1a|fig1b`.

accuracy CSV (benchmark fig1a), one row per (match rate, difference) cell:
    rho       fraction of nodes whose metadata value equals their planted group
    diff      c_in - c_out at fixed mean degree
    mean_acc  mean fraction of correctly assigned nodes over the networks
    stderr    standard error of mean_acc
    reps      networks in the cell

success CSV (benchmark fig1b), one row per four-group network:
    rep              network index
    acc_with         accuracy of the fit that sees the metadata
    acc_without      accuracy of the fit with a constant metadata column
    success_with     1 if that fit recovered the planted two-by-two split
    success_without  same for the fit without metadata

Usage: plot_benchmarks.py accuracy.csv [success.csv] [-o figure.png]
"""

import argparse

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd


def plot_accuracy(ax, path):
    df = pd.read_csv(path)
    for rho, cell in df.groupby("rho"):
        cell = cell.sort_values("diff")
        ax.errorbar(cell["diff"], cell["mean_acc"], yerr=cell["stderr"], marker="o", label=f"rho = {rho:g}")
    ax.set_xlabel("c_in - c_out")
    ax.set_ylabel("fraction correctly assigned")
    ax.legend()


def plot_success(ax, path):
    df = pd.read_csv(path)
    rates = [df["success_with"].mean(), df["success_without"].mean()]
    ax.bar(["with metadata", "without metadata"], rates)
    ax.set_ylim(0, 1)
    ax.set_ylabel("success fraction")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("accuracy")
    parser.add_argument("success", nargs="?")
    parser.add_argument("-o", "--out", default="benchmarks.png")
    args = parser.parse_args()
    panels = 2 if args.success else 1
    fig, axes = plt.subplots(1, panels, figsize=(6 * panels, 4), squeeze=False)
    plot_accuracy(axes[0][0], args.accuracy)
    if args.success:
        plot_success(axes[0][1], args.success)
    fig.tight_layout()
    fig.savefig(args.out)


if __name__ == "__main__":
    main()
