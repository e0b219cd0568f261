#!/usr/bin/env python3
"""Render the CSV/JSON artifacts written by the volkov CLI.

Usage: plot_results.py OUT_DIR [OUT_DIR ...]

For each directory the script looks for the known artifact names
(modes*.csv, channels.csv, trajectory.csv, spectrum.csv, tof.csv,
barrier.csv, phases.csv, residual.csv) and writes one PNG per plot next to
the data.
"""

import json
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np


def load_csv(path):
    data = np.genfromtxt(path, delimiter=",", names=True)
    return np.atleast_1d(data)


def plot_modes(path):
    rows = load_csv(path)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.semilogy(rows["n"], rows["w_norm2"], "o-", ms=4)
    ax.set_xlabel("mode index n")
    ax.set_ylabel(r"$\|w_n\|^2$")
    ax.set_title(path.stem)
    ax.grid(alpha=0.3)
    out = path.with_suffix(".png")
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out


def plot_channels(path):
    rows = load_csv(path)
    fig, (top, bottom) = plt.subplots(2, 1, sharex=True, figsize=(7, 6))
    for name in ("norm_a", "norm_b", "norm_c", "norm_d"):
        top.plot(rows["t"], rows[name], label=name)
    top.set_ylabel("channel norm")
    top.legend(ncol=4, fontsize=8)
    top.grid(alpha=0.3)
    bottom.plot(rows["t"], rows["delta"], color="k")
    bottom.set_xlabel("t")
    bottom.set_ylabel(r"$\Delta(t)$")
    bottom.grid(alpha=0.3)
    out = path.with_suffix(".png")
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out


def plot_trajectory(path):
    rows = load_csv(path)
    fig, (top, bottom) = plt.subplots(2, 1, sharex=True, figsize=(7, 6))
    top.plot(rows["t"], rows["z"], label="z")
    top.plot(rows["t"], rows["x"], label="x")
    top.plot(rows["t"], rows["y"], label="y")
    top.set_ylabel("centroid")
    top.legend(fontsize=8)
    top.grid(alpha=0.3)
    bottom.plot(rows["t"], rows["vz"], label="vz")
    bottom.plot(rows["t"], rows["vx"], label="vx")
    bottom.set_xlabel("t")
    bottom.set_ylabel("velocity")
    bottom.legend(fontsize=8)
    bottom.grid(alpha=0.3)
    out = path.with_suffix(".png")
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out


def plot_xy(path, xcol, ycols, logy=False, title=None):
    rows = load_csv(path)
    fig, ax = plt.subplots(figsize=(6, 4))
    for ycol in ycols:
        if logy:
            ax.semilogy(rows[xcol], rows[ycol], label=ycol)
        else:
            ax.plot(rows[xcol], rows[ycol], label=ycol)
    ax.set_xlabel(xcol)
    ax.legend(fontsize=8)
    ax.set_title(title or path.stem)
    ax.grid(alpha=0.3)
    out = path.with_suffix(".png")
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out


def handle_dir(dirpath):
    made = []
    for name in ("modes.csv", "modes_quadrature.csv", "modes_bessel.csv"):
        p = dirpath / name
        if p.exists():
            made.append(plot_modes(p))
    p = dirpath / "channels.csv"
    if p.exists():
        made.append(plot_channels(p))
    p = dirpath / "trajectory.csv"
    if p.exists():
        made.append(plot_trajectory(p))
    p = dirpath / "spectrum.csv"
    if p.exists():
        made.append(plot_xy(p, "omega", ["magnitude"], logy=True))
    p = dirpath / "tof.csv"
    if p.exists():
        made.append(plot_xy(p, "t", ["positive_norm2", "negative_norm2"], logy=True))
    p = dirpath / "barrier.csv"
    if p.exists():
        made.append(plot_xy(p, "E", ["T_lr", "R_l"], title="barrier"))
    p = dirpath / "phases.csv"
    if p.exists():
        made.append(plot_xy(p, "t0", ["negative_fraction"]))
    p = dirpath / "residual.csv"
    if p.exists():
        made.append(plot_xy(p, "h", ["residual"], logy=True))
    manifest = dirpath / "manifest.json"
    if manifest.exists():
        info = json.loads(manifest.read_text())
        print(f"{dirpath}: command={info.get('command')} wall={info.get('wall_time_s', 0):.2f}s")
    for m in made:
        print(f"  wrote {m}")
    return made


def main():
    if len(sys.argv) < 2:
        print(__doc__)
        return 1
    for arg in sys.argv[1:]:
        root = Path(arg)
        if not root.is_dir():
            print(f"skipping {root}: not a directory")
            continue
        handle_dir(root)
        for sub in sorted(root.iterdir()):
            if sub.is_dir():
                handle_dir(sub)
    return 0


if __name__ == "__main__":
    sys.exit(main())
