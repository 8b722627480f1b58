#!/usr/bin/env python3
"""Convergence curves of partition-based scores toward their exact limits.

Consumes a ``convergence.csv`` written by the experiment runner (columns
``n, forecast, mean_corrected_diff``) and draws, for every forecast, the
mean corrected score difference as a function of the partition
resolution ``n``.
"""

import argparse

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from _common import fail, load_rows, ordered_unique  # noqa: E402

CONVERGENCE_HEADER = ("n", "forecast", "mean_corrected_diff")


def curves(rows):
    """Map forecast name -> (sorted n values, mean corrected differences)."""
    names = ordered_unique(row["forecast"] for row in rows)
    out = {}
    for name in names:
        pairs = sorted(
            (int(row["n"]), float(row["mean_corrected_diff"]))
            for row in rows
            if row["forecast"] == name
        )
        ns = np.asarray([n for n, _ in pairs])
        if np.unique(ns).size != ns.size:
            fail(f"duplicate resolution entries for forecast {name!r}")
        out[name] = (ns, np.asarray([v for _, v in pairs]))
    return out


def render(curve_map, out_path, title=None):
    """Draw one line per forecast and return the Axes for inspection."""
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.axhline(0.0, color="0.55", linewidth=0.8, zorder=1)
    for name, (ns, values) in curve_map.items():
        ax.plot(ns, values, marker="o", markersize=3.5, label=name)
    ax.set_xlabel("cells per axis / intervals")
    ax.set_ylabel("mean corrected score difference")
    ax.set_title(title or "partition score minus exact score")
    ax.legend(ncol=2, fontsize="small")
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return ax


def main(argv=None):
    parser = argparse.ArgumentParser(
        description="convergence curves of partition-based scores"
    )
    parser.add_argument("--in", dest="in_path", required=True,
                        help="convergence.csv written by the experiment runner")
    parser.add_argument("--out", dest="out_path", required=True,
                        help="output image path")
    parser.add_argument("--title", default=None)
    args = parser.parse_args(argv)

    rows = load_rows(args.in_path, CONVERGENCE_HEADER)
    curve_map = curves(rows)
    render(curve_map, args.out_path, title=args.title)
    print(f"wrote {args.out_path} ({len(curve_map)} curves)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
