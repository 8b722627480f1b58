#!/usr/bin/env python3
"""Boxplots of per-repetition average score differences against a baseline.

Consumes a ``scores.csv`` written by the experiment runner (columns
``rep, pattern_idx, forecast, score, finite_flag``) and draws one box per
non-baseline forecast of the repetition-level mean score minus the
baseline's, so boxes above zero mark forecasts beaten by the baseline.
"""

import argparse
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib import cbook  # noqa: E402

from _common import fail, load_rows, ordered_unique  # noqa: E402

SCORES_HEADER = ("rep", "pattern_idx", "forecast", "score", "finite_flag")


def mean_differences(rows, baseline):
    """Per-repetition mean score of each forecast minus the baseline's.

    Only finite scores enter the means; a repetition contributes to a
    forecast's box only when both that forecast and the baseline have at
    least one finite score in it.
    """
    names = ordered_unique(row["forecast"] for row in rows)
    if baseline not in names:
        fail(f"baseline forecast {baseline!r} not present in the scores file")
    if len(names) < 2:
        fail("need at least two forecasts to draw score differences")

    sums = defaultdict(float)
    counts = defaultdict(int)
    for row in rows:
        if row["finite_flag"] != "1":
            continue
        key = (int(row["rep"]), row["forecast"])
        sums[key] += float(row["score"])
        counts[key] += 1

    reps = sorted({rep for rep, _ in counts})
    diffs = {}
    for name in names:
        if name == baseline:
            continue
        values = []
        for rep in reps:
            if counts[(rep, name)] and counts[(rep, baseline)]:
                own = sums[(rep, name)] / counts[(rep, name)]
                ref = sums[(rep, baseline)] / counts[(rep, baseline)]
                values.append(own - ref)
        if not values:
            fail(f"no repetition has finite scores for both {name!r} and the baseline")
        diffs[name] = np.asarray(values)
    return diffs


def render(diffs, baseline, out_path, title=None):
    """Draw the boxes and return the plotted statistics, one per forecast."""
    names = list(diffs)
    stats = []
    for name in names:
        st = cbook.boxplot_stats(diffs[name], labels=[name])[0]
        stats.append(st)

    fig, ax = plt.subplots(figsize=(1.6 + 1.1 * len(names), 4.0))
    ax.axhline(0.0, color="0.55", linewidth=0.8, zorder=1)
    ax.bxp(stats, showfliers=True)
    ax.set_xlabel("forecast")
    ax.set_ylabel(f"mean score difference vs {baseline}")
    ax.set_title(title or f"score differences against {baseline}")
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return stats


def main(argv=None):
    parser = argparse.ArgumentParser(
        description="boxplots of mean score differences against a baseline forecast"
    )
    parser.add_argument("--in", dest="in_path", required=True,
                        help="scores.csv written by the experiment runner")
    parser.add_argument("--out", dest="out_path", required=True,
                        help="output image path")
    parser.add_argument("--baseline", default=None,
                        help="baseline forecast name (default: first in the file)")
    parser.add_argument("--title", default=None)
    args = parser.parse_args(argv)

    rows = load_rows(args.in_path, SCORES_HEADER)
    baseline = args.baseline or ordered_unique(r["forecast"] for r in rows)[0]
    diffs = mean_differences(rows, baseline)
    render(diffs, baseline, args.out_path, title=args.title)
    print(f"wrote {args.out_path} ({len(diffs)} boxes, baseline {baseline})")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
