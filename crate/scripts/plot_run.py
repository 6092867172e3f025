#!/usr/bin/env python3
"""Plot the outputs of a `rarewave simulate` run.

Reads snapshots.csv and series.jsonl from an output directory and produces
two figures: field profiles (v, u, s) per recorded time, and the time
series of the perturbation norms, sup-norm distances to the exact fan, and
the energy functionals on log axes.

Usage:
    python3 scripts/plot_run.py OUT_DIR [--save PREFIX]

Only needs matplotlib on top of the standard library. With --save the
figures go to PREFIX_profiles.png and PREFIX_series.png instead of a
window.
"""

import argparse
import csv
import json
import sys
from collections import defaultdict
from pathlib import Path


def read_snapshots(path):
    """Columns t,x,v,u,s grouped by snapshot time. '#' lines are metadata."""
    by_time = defaultdict(lambda: defaultdict(list))
    with open(path, newline="") as fh:
        rows = csv.DictReader(line for line in fh if not line.startswith("#"))
        for row in rows:
            group = by_time[float(row["t"])]
            group["x"].append(float(row["x"]))
            for field in ("v", "u", "s"):
                group[field].append(float(row[field]))
    return dict(sorted(by_time.items()))


def read_series(path):
    with open(path) as fh:
        return [json.loads(line) for line in fh if line.strip()]


def plot_profiles(ax_v, ax_u, ax_s, snapshots):
    for t, fields in snapshots.items():
        label = f"t = {t:g}"
        ax_v.plot(fields["x"], fields["v"], label=label, lw=1.0)
        ax_u.plot(fields["x"], fields["u"], label=label, lw=1.0)
        ax_s.plot(fields["x"], fields["s"], label=label, lw=1.0)
    ax_v.set_ylabel("v")
    ax_u.set_ylabel("u")
    ax_s.set_ylabel("stress")
    ax_s.set_xlabel("x")
    ax_v.legend(fontsize=8)


def plot_series(ax_norm, ax_err, ax_energy, records):
    t = [r["t"] for r in records]
    for key in ("phi_l2", "psi_l2", "s_l2", "h2_total"):
        ax_norm.plot(t, [r["norms"][key] for r in records], label=key, marker=".")
    ax_norm.set_ylabel("perturbation norms")
    ax_norm.set_yscale("log")
    ax_norm.legend(fontsize=8)

    # sup errors are undefined at t = 0 where x/t degenerates
    late = [r for r in records if r["err"]["sup_v"] is not None]
    tl = [r["t"] for r in late]
    for key in ("sup_v", "sup_u", "sup_s"):
        ax_err.plot(tl, [r["err"][key] for r in late], label=key, marker=".")
    ax_err.set_ylabel("sup distance to fan")
    ax_err.set_yscale("log")
    ax_err.legend(fontsize=8)

    for key in ("E", "E1", "E2"):
        ax_energy.plot(t, [r[key] for r in records], label=key, marker=".")
    ax_energy.set_ylabel("energy functionals")
    ax_energy.set_xlabel("t")
    ax_energy.set_yscale("log")
    ax_energy.legend(fontsize=8)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("out_dir", type=Path, help="directory written by rarewave simulate")
    parser.add_argument("--save", metavar="PREFIX", help="write PNGs instead of showing windows")
    args = parser.parse_args()

    snapshots_path = args.out_dir / "snapshots.csv"
    series_path = args.out_dir / "series.jsonl"
    for path in (snapshots_path, series_path):
        if not path.exists():
            sys.exit(f"missing {path}; point this at a simulate output directory")

    import matplotlib

    if args.save:
        matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    snapshots = read_snapshots(snapshots_path)
    records = read_series(series_path)

    fig1, (ax_v, ax_u, ax_s) = plt.subplots(3, 1, sharex=True, figsize=(8, 8))
    fig1.suptitle("field snapshots")
    plot_profiles(ax_v, ax_u, ax_s, snapshots)

    fig2, (ax_norm, ax_err, ax_energy) = plt.subplots(3, 1, sharex=True, figsize=(8, 8))
    fig2.suptitle("diagnostics series")
    plot_series(ax_norm, ax_err, ax_energy, records)

    for fig in (fig1, fig2):
        fig.tight_layout()

    if args.save:
        fig1.savefig(f"{args.save}_profiles.png", dpi=150)
        fig2.savefig(f"{args.save}_series.png", dpi=150)
        print(f"wrote {args.save}_profiles.png and {args.save}_series.png")
    else:
        plt.show()


if __name__ == "__main__":
    main()
