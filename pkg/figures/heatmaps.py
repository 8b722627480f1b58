#!/usr/bin/env python3
"""Heat maps of the catalog intensity surfaces on a common color scale.

Consumes a grid dump written by ``ppscores dump-catalog --kind intensity``
(columns ``forecast, x, y, value``) and draws one panel per forecast.
All panels share a single color scale so brightness is comparable across
forecasts.
"""

import argparse
import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from _common import fail, load_rows, ordered_unique  # noqa: E402

DUMP_HEADER = ("forecast", "x", "y", "value")


def grids(rows):
    """Map forecast name -> (x grid, y grid, value array indexed [ix, iy])."""
    names = ordered_unique(row["forecast"] for row in rows)
    out = {}
    for name in names:
        own = [row for row in rows if row["forecast"] == name]
        xs = np.asarray(sorted({float(r["x"]) for r in own}))
        ys = np.asarray(sorted({float(r["y"]) for r in own}))
        if len(own) != xs.size * ys.size:
            fail(
                f"forecast {name!r}: {len(own)} rows do not fill a complete "
                f"{xs.size} x {ys.size} grid"
            )
        xi = {v: i for i, v in enumerate(xs)}
        yi = {v: i for i, v in enumerate(ys)}
        values = np.full((xs.size, ys.size), np.nan)
        for r in own:
            values[xi[float(r["x"])], yi[float(r["y"])]] = float(r["value"])
        if np.isnan(values).any():
            fail(f"forecast {name!r}: duplicate grid nodes leave holes in the grid")
        out[name] = (xs, ys, values)
    return out


def render(grid_map, out_path, title=None):
    """Draw the panels and return the AxesImage per forecast."""
    lo = min(float(v.min()) for _, _, v in grid_map.values())
    hi = max(float(v.max()) for _, _, v in grid_map.values())
    names = list(grid_map)
    cols = min(3, len(names))
    rows_ct = math.ceil(len(names) / cols)
    fig, axes = plt.subplots(rows_ct, cols,
                             figsize=(3.2 * cols, 2.9 * rows_ct),
                             squeeze=False)
    images = {}
    for k, name in enumerate(names):
        ax = axes[k // cols][k % cols]
        xs, ys, values = grid_map[name]
        im = ax.imshow(
            values.T, origin="lower",
            extent=(xs[0], xs[-1], ys[0], ys[-1]),
            vmin=lo, vmax=hi, aspect="equal", cmap="viridis",
        )
        ax.set_title(name, fontsize="small")
        images[name] = im
    for k in range(len(names), rows_ct * cols):
        axes[k // cols][k % cols].set_axis_off()
    fig.colorbar(im, ax=[a for row in axes for a in row],
                 shrink=0.85, label="intensity")
    if title:
        fig.suptitle(title)
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return images


def main(argv=None):
    parser = argparse.ArgumentParser(
        description="heat maps of the catalog intensity surfaces"
    )
    parser.add_argument("--in", dest="in_path", required=True,
                        help="grid dump from 'ppscores dump-catalog --kind intensity'")
    parser.add_argument("--out", dest="out_path", required=True,
                        help="output image path")
    parser.add_argument("--title", default=None)
    args = parser.parse_args(argv)

    rows = load_rows(args.in_path, DUMP_HEADER)
    grid_map = grids(rows)
    render(grid_map, args.out_path, title=args.title)
    print(f"wrote {args.out_path} ({len(grid_map)} panels)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
