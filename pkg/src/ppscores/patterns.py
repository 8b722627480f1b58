"""Core geometric data types: windows, point patterns, partitions.

All types are immutable after construction and safe to share across parallel
workers.  Cell/interval membership uses half-open extents (left-closed cells,
left-open intervals) so that counts always form an exact partition of the
pattern.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Window",
    "SpatialPattern",
    "TemporalPattern",
    "GridPartition",
    "IntervalPartition",
    "count_in_cells",
    "count_in_intervals",
    "pairwise_differences",
    "unit_square",
    "write_spatial_csv",
    "read_spatial_csv",
    "write_temporal_csv",
    "read_temporal_csv",
]

_AXIS_NAMES = ("x", "y", "z")


@dataclass(frozen=True)
class Window:
    """Axis-aligned box observation window in dimension 1..3."""

    lower: tuple
    upper: tuple

    def __post_init__(self):
        lower = tuple(float(v) for v in np.atleast_1d(self.lower))
        upper = tuple(float(v) for v in np.atleast_1d(self.upper))
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        if len(lower) != len(upper):
            raise ValueError("window lower/upper have different dimensions")
        if not 1 <= len(lower) <= 3:
            raise ValueError(f"window dimension {len(lower)} not in 1..3")
        if any(lo >= hi for lo, hi in zip(lower, upper)):
            raise ValueError(f"degenerate window: lower={lower}, upper={upper}")

    @property
    def dim(self) -> int:
        return len(self.lower)

    @property
    def sides(self) -> np.ndarray:
        return np.asarray(self.upper) - np.asarray(self.lower)

    @property
    def volume(self) -> float:
        return float(np.prod(self.sides))

    def contains(self, points) -> np.ndarray:
        """Boolean mask: which points lie in the closed box."""
        pts = np.asarray(points, dtype=float).reshape(-1, self.dim)
        lo = np.asarray(self.lower)
        hi = np.asarray(self.upper)
        return np.all((pts >= lo) & (pts <= hi), axis=1)


def unit_square() -> Window:
    return Window((0.0, 0.0), (1.0, 1.0))


@dataclass(frozen=True, eq=False)
class SpatialPattern:
    """A finite point configuration with its observation window.

    Points are stored as an (n, d) float array; any permutation of the rows
    represents the same pattern.  Coincident points are kept as-is.
    Instances compare by identity.
    """

    points: np.ndarray
    window: Window

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.size == 0:
            pts = np.empty((0, self.window.dim), dtype=float)
        if pts.ndim == 1 and self.window.dim == 1:
            pts = pts.reshape(-1, 1)
        if pts.ndim != 2 or pts.shape[1] != self.window.dim:
            raise ValueError(
                f"points shape {np.asarray(self.points).shape} does not match "
                f"window dimension {self.window.dim}"
            )
        pts = np.ascontiguousarray(pts)
        inside = self.window.contains(pts)
        if not bool(inside.all()):
            bad = pts[~inside][0]
            raise ValueError(
                f"point {tuple(bad)} lies outside window "
                f"[{self.window.lower}, {self.window.upper}]"
            )
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return int(self.points.shape[0])


@dataclass(frozen=True, eq=False)
class TemporalPattern:
    """Event times 0 < t_1 < ... < t_n <= T with horizon T.

    Instances compare by identity.
    """

    times: np.ndarray
    horizon: float

    def __post_init__(self):
        t = np.sort(np.asarray(self.times, dtype=float).ravel())
        horizon = float(self.horizon)
        if horizon <= 0:
            raise ValueError("horizon must be positive")
        if t.size:
            if t[0] <= 0 or t[-1] > horizon:
                raise ValueError(
                    f"event times must lie in (0, {horizon}]; got range "
                    f"[{t[0]}, {t[-1]}]"
                )
            if np.any(np.diff(t) <= 0):
                raise ValueError("event times must be strictly increasing (ties found)")
        t.setflags(write=False)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "horizon", horizon)

    def __len__(self) -> int:
        return int(self.times.size)


@dataclass(frozen=True)
class GridPartition:
    """Uniform n^d grid of axis-aligned cells over a window.

    Cells are half-open boxes [lo, hi) except that the topmost cell along each
    axis is closed, so every in-window point belongs to exactly one cell.  Flat
    cell indices run in C order over the axes.
    """

    window: Window
    cells_per_axis: int

    def __post_init__(self):
        n = int(self.cells_per_axis)
        if n < 1:
            raise ValueError("cells_per_axis must be >= 1")
        object.__setattr__(self, "cells_per_axis", n)

    @property
    def n_cells(self) -> int:
        return self.cells_per_axis ** self.window.dim

    @property
    def cell_volume(self) -> float:
        return self.window.volume / self.n_cells

    def cell_index(self, points) -> np.ndarray:
        """Flat cell index for each point (C order across axes)."""
        n = self.cells_per_axis
        pts = np.asarray(points, dtype=float).reshape(-1, self.window.dim)
        lo = np.asarray(self.window.lower)
        rel = (pts - lo) / self.window.sides
        axis_idx = np.floor(rel * n).astype(np.int64)
        # points exactly on the upper boundary fall into the closed top cell
        np.clip(axis_idx, 0, n - 1, out=axis_idx)
        flat = axis_idx[:, 0]
        for k in range(1, self.window.dim):
            flat = flat * n + axis_idx[:, k]
        return flat

    def cell_bounds(self, flat_index: int) -> tuple:
        """(lower, upper) corner arrays of one cell, for inspection/tests."""
        n = self.cells_per_axis
        d = self.window.dim
        idx = np.empty(d, dtype=np.int64)
        rem = int(flat_index)
        for k in range(d - 1, -1, -1):
            idx[k] = rem % n
            rem //= n
        widths = self.window.sides / n
        lo = np.asarray(self.window.lower) + idx * widths
        return lo, lo + widths


@dataclass(frozen=True, eq=False)
class IntervalPartition:
    """Partition of (0, T] into left-open right-closed intervals."""

    horizon: float
    breakpoints: np.ndarray

    def __eq__(self, other):
        if not isinstance(other, IntervalPartition):
            return NotImplemented
        return self.horizon == other.horizon and np.array_equal(
            self.breakpoints, other.breakpoints
        )

    __hash__ = None

    def __post_init__(self):
        horizon = float(self.horizon)
        bp = np.asarray(self.breakpoints, dtype=float).ravel()
        if bp.size < 2 or bp[0] != 0.0 or bp[-1] != horizon:
            raise ValueError("breakpoints must run from 0 to the horizon")
        if np.any(np.diff(bp) <= 0):
            raise ValueError("breakpoints must be strictly increasing")
        bp.setflags(write=False)
        object.__setattr__(self, "horizon", horizon)
        object.__setattr__(self, "breakpoints", bp)

    @classmethod
    def equal(cls, horizon: float, k: int) -> "IntervalPartition":
        """k equal-length intervals ((i-1)T/k, iT/k]."""
        bp = np.linspace(0.0, float(horizon), int(k) + 1)
        bp[-1] = float(horizon)
        return cls(horizon, bp)

    @property
    def n_intervals(self) -> int:
        return int(self.breakpoints.size - 1)

    @property
    def lengths(self) -> np.ndarray:
        return np.diff(self.breakpoints)

    def interval_index(self, times) -> np.ndarray:
        """Index i with t in (a_i, a_{i+1}] for each time."""
        t = np.asarray(times, dtype=float).ravel()
        return np.searchsorted(self.breakpoints, t, side="left") - 1


def count_in_cells(pattern: SpatialPattern, partition: GridPartition) -> np.ndarray:
    """Per-cell point counts; counts sum to len(pattern)."""
    if partition.window != pattern.window:
        raise ValueError(
            f"partition window {partition.window} does not match "
            f"pattern window {pattern.window}"
        )
    if len(pattern) == 0:
        return np.zeros(partition.n_cells, dtype=np.int64)
    flat = partition.cell_index(pattern.points)
    return np.bincount(flat, minlength=partition.n_cells).astype(np.int64)


def count_in_intervals(pattern: TemporalPattern, partition: IntervalPartition) -> np.ndarray:
    """Per-interval event counts; interval i receives times in (a_i, a_{i+1}]."""
    if partition.horizon != pattern.horizon:
        raise ValueError(
            f"partition horizon {partition.horizon} does not match "
            f"pattern horizon {pattern.horizon}"
        )
    if len(pattern) == 0:
        return np.zeros(partition.n_intervals, dtype=np.int64)
    idx = partition.interval_index(pattern.times)
    return np.bincount(idx, minlength=partition.n_intervals).astype(np.int64)


def pairwise_differences(pattern: SpatialPattern) -> np.ndarray:
    """All n(n-1) ordered displacement vectors x_i - x_j, i != j.

    Empty for patterns with fewer than two points.
    """
    pts = pattern.points
    n = pts.shape[0]
    if n < 2:
        return np.empty((0, pts.shape[1]))
    ii, jj = np.nonzero(~np.eye(n, dtype=bool))
    return pts[ii] - pts[jj]


def write_spatial_csv(pattern: SpatialPattern, path) -> None:
    """Write pattern coordinates with header x[,y[,z]]; window lives in config."""
    d = pattern.window.dim
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_AXIS_NAMES[:d])
        writer.writerows(pattern.points.tolist())


def read_spatial_csv(path, window: Window) -> SpatialPattern:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if [h.strip() for h in header] != list(_AXIS_NAMES[: window.dim]):
            raise ValueError(f"unexpected spatial CSV header {header}")
        rows = [[float(v) for v in row] for row in reader if row]
    return SpatialPattern(np.asarray(rows, dtype=float), window)


def write_temporal_csv(pattern: TemporalPattern, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t"])
        writer.writerows([[t] for t in pattern.times.tolist()])


def read_temporal_csv(path, horizon: float) -> TemporalPattern:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if [h.strip() for h in header] != ["t"]:
            raise ValueError(f"unexpected temporal CSV header {header}")
        times = [float(row[0]) for row in reader if row]
    return TemporalPattern(np.asarray(times, dtype=float), horizon)
