#!/usr/bin/env python3
"""Plot occupation and CSI curves from a ppcorr sweep CSV.

Pure data consumer: reads the CSV emitted by `ppcorr sweep`, one figure for
the mean occupations and one for the CSI with the classicality line at 1.

Usage: plot_sweep.py sweep.csv [out_prefix]
"""
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd


def main() -> int:
    if len(sys.argv) < 2:
        print(__doc__)
        return 1
    path = sys.argv[1]
    prefix = sys.argv[2] if len(sys.argv) > 2 else path.rsplit(".", 1)[0]

    df = pd.read_csv(path, comment="#")
    param = df.columns[0]

    fig, (ax_b, ax_a) = plt.subplots(1, 2, figsize=(10, 4))
    for nbar, group in df.groupby("nbar"):
        ok = group[group["status"] == "ok"]
        ax_b.plot(ok[param], ok["mean_b"], label=f"nbar = {nbar}")
        ax_a.plot(ok[param], ok["mean_a"], label=f"nbar = {nbar}")
    ax_b.set_xlabel(f"{param} / gamma")
    ax_b.set_ylabel(r"$\langle b^\dagger b\rangle$")
    ax_a.set_xlabel(f"{param} / gamma")
    ax_a.set_ylabel(r"$\langle a^\dagger a\rangle$")
    for ax in (ax_b, ax_a):
        ax.legend()
    fig.tight_layout()
    fig.savefig(f"{prefix}_occupations.png", dpi=160)

    fig2, ax = plt.subplots(figsize=(6, 4))
    for nbar, group in df.groupby("nbar"):
        ok = group[(group["status"] == "ok") & group["csi"].notna()]
        ax.plot(ok[param], ok["csi"], label=f"nbar = {nbar}")
    ax.axhline(1.0, color="k", ls="--", lw=0.8, label="classical bound")
    ax.set_xlabel(f"{param} / gamma")
    ax.set_ylabel("CSI")
    ax.legend()
    fig2.tight_layout()
    fig2.savefig(f"{prefix}_csi.png", dpi=160)
    print(f"wrote {prefix}_occupations.png and {prefix}_csi.png")
    return 0


if __name__ == "__main__":
    sys.exit(main())
