"""Scoring functions for point-process forecasts.

Covers intensity scores (exact, combined, binned), second-order product-density
and factorial-moment scores, K/L-function scores with edge-corrected pair
estimators, conditional-intensity scores for temporal processes (exact,
stepwise, interval-based), information/entropy gain, and the Hyvärinen-type
score for densities known up to normalization.

All scores are negatively oriented.  A zero forecast density at an observation
yields a flagged +inf sentinel, never an exception, so Monte Carlo layers can
count explosion frequencies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import permutations
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy.spatial.distance import pdist

from . import elementary
from .elementary import QUADRATIC, BregmanGenerator, binary_log_score, bregman_score, log_score
from .patterns import (
    GridPartition,
    IntervalPartition,
    SpatialPattern,
    TemporalPattern,
    Window,
    count_in_cells,
    count_in_intervals,
)
from .simulate import HawkesConfig, RngLike, sample_hawkes

__all__ = [
    "intensity_mass",
    "cell_masses",
    "LogDensityScore",
    "LOG_DENSITY",
    "IntensityForecast",
    "ProductDensityForecast",
    "FactorialMomentForecast",
    "KForecast",
    "LForecast",
    "CondIntensityForecast",
    "BinForecast",
    "IntervalProbForecast",
    "score_intensity_poisson",
    "score_intensity_combined",
    "score_normalized_intensity",
    "score_bin",
    "bin_reports_from_intensity",
    "spatial_correction_term",
    "score_product_density",
    "score_factorial_moment",
    "kappa_st",
    "kappa_minus",
    "default_r_grid",
    "score_k_function",
    "score_l_function",
    "score_cond_intensity_log",
    "score_temporal_stepwise",
    "step_log_score",
    "StepCrps",
    "binary_tail_score",
    "interval_reports_from_cond_intensity",
    "score_interval",
    "temporal_correction_term",
    "information_gain",
    "estimate_entropy_gain",
    "hyvarinen_pp_score",
    "unit_ball_volume",
]


# ---------------------------------------------------------------------------
# quadrature
# ---------------------------------------------------------------------------

def _leggauss_cell_masses(density: Callable, window: Window, n: int, degree: int) -> np.ndarray:
    """Per-cell tensor Gauss-Legendre masses on the uniform n^d grid (C order)."""
    d = window.dim
    if n ** d * degree ** d > 4_000_000:
        raise ValueError("quadrature grid too large")
    x, w = np.polynomial.legendre.leggauss(degree)
    widths = window.sides / n
    half = 0.5 * widths
    axis_nodes = []
    for k in range(d):
        starts = window.lower[k] + np.arange(n) * widths[k]
        nodes = starts[:, None] + (x[None, :] + 1.0) * half[k]
        axis_nodes.append(nodes.ravel())
    if d == 1:
        vals = np.asarray(density(axis_nodes[0][:, None]), dtype=float).reshape(n, degree)
        return vals @ w * half[0]
    if d == 2:
        mesh = np.meshgrid(axis_nodes[0], axis_nodes[1], indexing="ij")
        pts = np.stack([m.ravel() for m in mesh], axis=1)
        vals = np.asarray(density(pts), dtype=float).reshape(n, degree, n, degree)
        masses = np.einsum("iajb,a,b->ij", vals, w, w) * half[0] * half[1]
        return masses.reshape(-1)
    mesh = np.meshgrid(axis_nodes[0], axis_nodes[1], axis_nodes[2], indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=1)
    vals = np.asarray(density(pts), dtype=float).reshape(n, degree, n, degree, n, degree)
    masses = np.einsum("iajbkc,a,b,c->ijk", vals, w, w, w) * half[0] * half[1] * half[2]
    return masses.reshape(-1)


def intensity_mass(density: Callable, window: Window, degree: int = 64) -> float:
    """|Λ| = ∫_W λ by tensor Gauss-Legendre quadrature."""
    return float(_leggauss_cell_masses(density, window, 1, degree)[0])


def cell_masses(density: Callable, partition: GridPartition, degree: int = 8) -> np.ndarray:
    """Per-cell ∫_B λ for all cells of the partition."""
    return _leggauss_cell_masses(density, partition.window, partition.cells_per_axis, degree)


# ---------------------------------------------------------------------------
# density scores (S′ slots)
# ---------------------------------------------------------------------------

class LogDensityScore:
    """Logarithmic density score -log p; the strictly proper default S′."""

    def __call__(self, density_fn: Callable, observation) -> float:
        return log_score(density_fn(observation))

    @staticmethod
    def score_values(values: np.ndarray) -> float:
        vals = np.asarray(values, dtype=float)
        if vals.size == 0:
            return 0.0
        if np.any(vals <= 0.0) or not np.all(np.isfinite(vals)):
            return math.inf
        return float(-np.log(vals).sum())


LOG_DENSITY = LogDensityScore()


def _sum_density_scores(density_score, normalized_values: np.ndarray,
                        normalized_fn: Callable, points: np.ndarray) -> float:
    """Σ S′ over observations; vectorized for scores exposing score_values."""
    if hasattr(density_score, "score_values"):
        return density_score.score_values(normalized_values)
    return float(sum(density_score(normalized_fn, p) for p in points))


# ---------------------------------------------------------------------------
# forecast types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IntensityForecast:
    """Intensity function λ with precomputed total mass |Λ| over the window."""

    density: Callable[[np.ndarray], np.ndarray]
    window: Window
    name: str = ""
    mass: Optional[float] = None
    quad_degree: int = 64

    def __post_init__(self):
        if self.mass is None:
            object.__setattr__(
                self, "mass", intensity_mass(self.density, self.window, self.quad_degree)
            )
        if not (np.isfinite(self.mass) and self.mass > 0):
            raise ValueError(f"forecast mass must be positive and finite, got {self.mass}")

    def density_at(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=float).reshape(-1, self.window.dim)
        return np.asarray(self.density(pts), dtype=float)

    def normalized_at(self, points) -> np.ndarray:
        return self.density_at(points) / self.mass


@dataclass(frozen=True)
class ProductDensityForecast:
    """Radial second-order product density ρ₀²(r) with mass |ρ²| over W²."""

    radial: Callable[[np.ndarray], np.ndarray]
    window: Window
    name: str = ""
    mass: Optional[float] = None
    quad_degree: int = 256

    def __post_init__(self):
        if self.mass is None:
            sides = self.window.sides
            diff_window = Window(tuple(-sides), tuple(sides))

            def integrand(deltas):
                dist = np.linalg.norm(deltas, axis=1)
                setcov = np.prod(sides - np.abs(deltas), axis=1)
                return np.asarray(self.radial(dist), dtype=float) * setcov

            object.__setattr__(
                self, "mass", intensity_mass(integrand, diff_window, self.quad_degree)
            )
        if not (np.isfinite(self.mass) and self.mass > 0):
            raise ValueError(f"|ρ²| must be positive and finite, got {self.mass}")


@dataclass(frozen=True)
class FactorialMomentForecast:
    """Normalized n-point density of order `order` plus total mass over W^order."""

    order: int
    density: Callable[[np.ndarray], float]  # (order, d) tuple -> density value
    mass: float
    name: str = ""

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("order must be >= 1")
        if not (np.isfinite(self.mass) and self.mass > 0):
            raise ValueError("mass must be positive and finite")


def _spot_check_monotone(fn: Callable, r_max: float, label: str) -> None:
    grid = np.linspace(r_max / 64.0, r_max, 64)
    vals = np.asarray(fn(grid), dtype=float)
    if np.any(vals < -1e-12) or np.any(np.diff(vals) < -1e-9 * (1.0 + np.abs(vals[:-1]))):
        raise ValueError(f"{label} must be nonnegative and non-decreasing")


@dataclass(frozen=True)
class KForecast:
    """Stationary report (λ, K(·)) for the K-function score."""

    intensity: float
    k_fn: Callable[[np.ndarray], np.ndarray]
    name: str = ""
    r_max: float = 0.25

    def __post_init__(self):
        if self.intensity <= 0:
            raise ValueError("intensity must be positive")
        _spot_check_monotone(self.k_fn, self.r_max, "K function")


@dataclass(frozen=True)
class LForecast:
    """Stationary report (λ, L(·)); K(r) = b_d L(r)^d with b_d the unit-ball volume."""

    intensity: float
    l_fn: Callable[[np.ndarray], np.ndarray]
    name: str = ""
    r_max: float = 0.25

    def __post_init__(self):
        if self.intensity <= 0:
            raise ValueError("intensity must be positive")
        _spot_check_monotone(self.l_fn, self.r_max, "L function")


def unit_ball_volume(d: int) -> float:
    return {1: 2.0, 2: math.pi, 3: 4.0 * math.pi / 3.0}[d]


@dataclass(frozen=True, eq=False)
class BinForecast:
    """Positive expected counts per cell of a grid partition."""

    values: np.ndarray
    partition: GridPartition

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float).ravel()
        if vals.size != self.partition.n_cells:
            raise ValueError(
                f"{vals.size} bin reports for {self.partition.n_cells} cells"
            )
        if np.any(vals <= 0) or not np.all(np.isfinite(vals)):
            raise ValueError("bin reports must be positive and finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)


@dataclass(frozen=True, eq=False)
class IntervalProbForecast:
    """Occupancy probabilities per interval of a partition of (0, T]."""

    probs: np.ndarray
    partition: IntervalPartition

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float).ravel()
        if p.size != self.partition.n_intervals:
            raise ValueError(
                f"{p.size} probability reports for {self.partition.n_intervals} intervals"
            )
        if np.any(p <= 0.0) or np.any(p >= 1.0):
            raise ValueError("occupancy probabilities must lie strictly in (0, 1)")
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)


@dataclass(frozen=True)
class CondIntensityForecast:
    """Conditional-intensity report λ*(t | history) = ν + Σ_{t_i < t} g(t - t_i).

    The trigger object supplies the kernel value, its exact cumulative
    (closed form where available, quadrature otherwise), and total mass.
    Left-continuity convention: the rate at an event time uses only strictly
    earlier events.  Subcriticality is deliberately NOT required here — a
    supercritical triggering function is a legal report, just not a simulable
    truth.
    """

    background: float
    trigger: object
    name: str = ""

    def __post_init__(self):
        if self.background < 0:
            raise ValueError("background rate must be nonnegative")

    def rate_at_events(self, pattern: TemporalPattern) -> np.ndarray:
        """λ*(t_i | t_1..t_{i-1}) for every event of the pattern."""
        t = pattern.times
        n = t.size
        if n == 0:
            return np.empty(0)
        lags = t[:, None] - t[None, :]
        contrib = np.asarray(self.trigger.value(lags), dtype=float)
        contrib[~np.tri(n, k=-1, dtype=bool)] = 0.0  # keep strictly earlier events
        return self.background + contrib.sum(axis=1)

    def compensator(self, pattern: TemporalPattern) -> float:
        """∫₀^T λ*(u) du along the realized history."""
        tail = self.trigger.cumulative(pattern.horizon - pattern.times)
        return self.background * pattern.horizon + float(np.sum(tail))

    def mass_between(self, start: float, end, history: np.ndarray) -> np.ndarray:
        """∫_start^end λ*(u | history) du with history frozen (all t_j <= start)."""
        end = np.asarray(end, dtype=float)
        base = self.background * (end - start)
        if history.size == 0:
            return base
        upper = self.trigger.cumulative(end[..., None] - history)
        lower = self.trigger.cumulative(start - history)
        return base + (upper - lower).sum(axis=-1)

    def interval_masses(self, partition: IntervalPartition,
                        pattern: TemporalPattern) -> np.ndarray:
        """Per interval (a_i, b_i]: ∫ λ*(t | events strictly before a_i) dt."""
        if partition.horizon != pattern.horizon:
            raise ValueError("partition horizon does not match pattern horizon")
        a = partition.breakpoints[:-1]
        b = partition.breakpoints[1:]
        masses = self.background * (b - a)
        t = pattern.times
        if t.size:
            upper = np.asarray(self.trigger.cumulative(b[:, None] - t[None, :]), dtype=float)
            lower = np.asarray(self.trigger.cumulative(a[:, None] - t[None, :]), dtype=float)
            known = t[None, :] < a[:, None]
            masses = masses + np.where(known, upper - lower, 0.0).sum(axis=1)
        return masses


# ---------------------------------------------------------------------------
# intensity scores
# ---------------------------------------------------------------------------

def score_intensity_poisson(f: IntensityForecast, pattern: SpatialPattern) -> float:
    """-Σ log λ(y_i) + |Λ| — the Poisson-likelihood intensity score."""
    vals = f.density_at(pattern.points) if len(pattern) else np.empty(0)
    log_part = LogDensityScore.score_values(vals)
    if not np.isfinite(log_part):
        return math.inf
    return log_part + f.mass


def score_normalized_intensity(f: IntensityForecast, pattern: SpatialPattern,
                               density_score=LOG_DENSITY) -> float:
    """Σ S′(λ/|Λ|, y_i); zero on empty patterns."""
    if len(pattern) == 0:
        return 0.0
    vals = f.normalized_at(pattern.points)
    fn = lambda y: float(f.normalized_at(np.atleast_2d(y))[0])
    return _sum_density_scores(density_score, vals, fn, pattern.points)


def score_intensity_combined(f: IntensityForecast, pattern: SpatialPattern,
                             density_score=LOG_DENSITY,
                             count_bregman: BregmanGenerator = QUADRATIC,
                             c: float = 1.0) -> float:
    """Σ S′(λ/|Λ|, y_i) + c · b(|Λ|, n) — density part plus expected-count part."""
    density_part = score_normalized_intensity(f, pattern, density_score)
    count_part = c * bregman_score(count_bregman, f.mass, float(len(pattern)))
    return density_part + count_part


# ---------------------------------------------------------------------------
# binned intensity scores
# ---------------------------------------------------------------------------

def score_bin(f: BinForecast, pattern: SpatialPattern) -> float:
    """Σ_i [ -count_i log λ_i + λ_i ] over the partition's cells."""
    counts = count_in_cells(pattern, f.partition)
    return float(np.sum(-counts * np.log(f.values) + f.values))


def bin_reports_from_intensity(density: Callable, partition: GridPartition,
                               degree: int = 8) -> BinForecast:
    """Per-cell integrals of the intensity as bin reports."""
    return BinForecast(cell_masses(density, partition, degree), partition)


def spatial_correction_term(pattern: SpatialPattern, partition: GridPartition) -> float:
    """Σ over occupied cells of log |B_i| (forecast-independent)."""
    if len(pattern) == 0:
        return 0.0
    occupied = np.unique(partition.cell_index(pattern.points))
    return float(occupied.size * math.log(partition.cell_volume))


# ---------------------------------------------------------------------------
# second-order scores
# ---------------------------------------------------------------------------

def score_product_density(f: ProductDensityForecast, pattern: SpatialPattern,
                          c: float) -> float:
    """-Σ^≠ log ρ₀²(‖x₁-x₂‖) + m^[2] log|ρ²| + c (|ρ²| - m^[2])².

    Σ^≠ runs over ordered pairs, so every unordered pair enters twice and
    m^[2] = m(m-1).
    """
    m = len(pattern)
    m2 = m * (m - 1)
    count_part = c * (f.mass - m2) ** 2
    if m < 2:
        return count_part
    dists = pdist(pattern.points)
    vals = np.asarray(f.radial(dists), dtype=float)
    if np.any(vals <= 0.0) or not np.all(np.isfinite(vals)):
        return math.inf
    pair_part = -2.0 * float(np.log(vals).sum())
    return pair_part + m2 * math.log(f.mass) + count_part


def score_factorial_moment(f: FactorialMomentForecast, pattern: SpatialPattern,
                           density_score=LOG_DENSITY,
                           count_bregman: BregmanGenerator = QUADRATIC,
                           c: float = 1.0) -> float:
    """Σ^≠ over ordered n-tuples of S′(α*, tuple) + c · b(α(X^n), m^[n])."""
    m = len(pattern)
    n = f.order
    m_falling = math.perm(m, n) if m >= n else 0
    if m_falling > 10 ** 7:
        raise ValueError(
            f"{m_falling} ordered {n}-tuples from {m} points exceeds the 1e7 guard"
        )
    count_part = c * bregman_score(count_bregman, f.mass, float(m_falling))
    if m_falling == 0:
        return count_part
    pts = pattern.points
    normalized = lambda tup: f.density(tup) / f.mass
    total = 0.0
    for idx in permutations(range(m), n):
        total += density_score(normalized, pts[list(idx)])
        if math.isinf(total):
            return math.inf
    return total + count_part


# ---------------------------------------------------------------------------
# K / L function scores
# ---------------------------------------------------------------------------

def kappa_st(pattern: SpatialPattern, r: float) -> float:
    """Translation-corrected pair count Σ^≠ 1{‖x₂-x₁‖≤r} / |W_{x₁} ∩ W_{x₂}|."""
    window = pattern.window
    sides = window.sides
    if not 0.0 < r < sides.min():
        raise ValueError(f"radius {r} outside (0, min window side {sides.min()})")
    if len(pattern) < 2:
        return 0.0
    pts = pattern.points
    diffs = pts[:, None, :] - pts[None, :, :]
    dist2 = np.sum(diffs ** 2, axis=-1)
    close = dist2 <= r * r
    np.fill_diagonal(close, False)
    if not close.any():
        return 0.0
    overlap = np.prod(sides - np.abs(diffs[close]), axis=-1)
    return float(np.sum(1.0 / overlap))


def kappa_minus(pattern: SpatialPattern, r: float) -> float:
    """Minus-sampling pair count |W|⁻¹ Σ^≠, second point in the eroded window."""
    window = pattern.window
    lo = np.asarray(window.lower) + r
    hi = np.asarray(window.upper) - r
    if np.any(lo >= hi):
        raise ValueError(f"eroded window is empty for radius {r}")
    if len(pattern) < 2:
        return 0.0
    pts = pattern.points
    inner = np.all((pts >= lo) & (pts <= hi), axis=1)
    if not inner.any():
        return 0.0
    diffs = pts[:, None, :] - pts[None, :, :]
    dist2 = np.sum(diffs ** 2, axis=-1)
    close = dist2 <= r * r
    np.fill_diagonal(close, False)
    pairs = close & inner[None, :]  # ordered pair (x1=i, x2=j) needs x2 eroded
    return float(pairs.sum()) / window.volume


def default_r_grid(r_max: float = 0.25, count: int = 50) -> np.ndarray:
    """Equispaced radii r_max/count, 2 r_max/count, ..., r_max in (0, r_max]."""
    return np.linspace(r_max / count, r_max, count)


def score_k_function(f: KForecast, pattern: SpatialPattern,
                     b1: BregmanGenerator = QUADRATIC,
                     b2: BregmanGenerator = QUADRATIC,
                     kappa: Callable[[SpatialPattern, float], float] = kappa_st,
                     r_grid: Optional[np.ndarray] = None,
                     weight: Optional[Callable[[np.ndarray], np.ndarray]] = None) -> float:
    """b₁(λ, φ(W)/|W|) + ∫ b₂(λ² K(r), κ(B_r, φ)) w(r) dr (trapezoid on r_grid)."""
    if r_grid is None:
        r_grid = default_r_grid(f.r_max)
    r_grid = np.asarray(r_grid, dtype=float)
    lam_hat = len(pattern) / pattern.window.volume
    total = bregman_score(b1, f.intensity, lam_hat)
    k_vals = np.asarray(f.k_fn(r_grid), dtype=float)
    kap_vals = np.array([kappa(pattern, r) for r in r_grid])
    integrand = b2.score(f.intensity ** 2 * k_vals, kap_vals)
    if weight is not None:
        integrand = integrand * np.asarray(weight(r_grid), dtype=float)
    return total + float(np.trapezoid(integrand, r_grid))


def score_l_function(f: LForecast, pattern: SpatialPattern,
                     b1: BregmanGenerator = QUADRATIC,
                     b2: BregmanGenerator = QUADRATIC,
                     kappa: Callable[[SpatialPattern, float], float] = kappa_st,
                     r_grid: Optional[np.ndarray] = None,
                     weight: Optional[Callable[[np.ndarray], np.ndarray]] = None) -> float:
    """K-function score with K(r) = b_d L(r)^d substituted for the report."""
    d = pattern.window.dim
    bd = unit_ball_volume(d)
    k_equiv = KForecast(
        f.intensity,
        lambda r: bd * np.asarray(f.l_fn(r), dtype=float) ** d,
        name=f.name,
        r_max=f.r_max,
    )
    return score_k_function(k_equiv, pattern, b1, b2, kappa, r_grid, weight)


# ---------------------------------------------------------------------------
# conditional-intensity scores
# ---------------------------------------------------------------------------

def score_cond_intensity_log(f: CondIntensityForecast, pattern: TemporalPattern) -> float:
    """-Σ log λ*(t_i) + ∫₀^T λ* — the temporal log-likelihood score."""
    rates = f.rate_at_events(pattern)
    log_part = LogDensityScore.score_values(rates)
    if not np.isfinite(log_part):
        return math.inf
    return log_part + f.compensator(pattern)


def step_log_score(pdf: Callable, cdf: Callable, y: float) -> float:
    """Log-score slot for the stepwise temporal decomposition."""
    return log_score(pdf(y))


@dataclass(frozen=True)
class StepCrps:
    """CRPS slot evaluating the step's conditional CDF on a fixed range."""

    lo: float
    hi: float
    panels: int = 400

    def __call__(self, pdf: Callable, cdf: Callable, y: float) -> float:
        return elementary.crps(cdf, y, self.lo, self.hi, self.panels)


def binary_tail_score(survival: float) -> float:
    """S′(1 - F_{n+1}(T), 1) with the binary log score."""
    return binary_log_score(survival, 1)


def score_temporal_stepwise(f: CondIntensityForecast, pattern: TemporalPattern,
                            step_scores: Union[Callable, Sequence[Callable]] = step_log_score,
                            tail_score: Callable[[float], float] = binary_tail_score) -> float:
    """Σ_i S_i(f_i(· | t_1..t_{i-1}), t_i) + S′(1 - F_{n+1}(T | …), 1).

    The i-th conditional density is f_i(t) = λ*(t) exp(-∫_{t_{i-1}}^t λ*) with
    history frozen at the previous event.
    """
    t = pattern.times
    n = t.size
    if callable(step_scores):
        scores = [step_scores] * n
    else:
        scores = list(step_scores)
        if len(scores) != n:
            raise ValueError(f"{len(scores)} step scores for {n} events")

    total = 0.0
    prev = 0.0
    for i in range(n):
        history = t[:i]

        def pdf(u, prev=prev, history=history):
            u_arr = np.atleast_1d(np.asarray(u, dtype=float))
            rate = f.background + np.asarray(
                f.trigger.value(u_arr[:, None] - history[None, :]), dtype=float
            ).sum(axis=1) if history.size else np.full(u_arr.shape, f.background)
            mass = f.mass_between(prev, u_arr, history)
            out = np.where(u_arr > prev, rate * np.exp(-mass), 0.0)
            return out if np.ndim(u) else float(out[0])

        def cdf(u, prev=prev, history=history):
            u_arr = np.atleast_1d(np.asarray(u, dtype=float))
            mass = f.mass_between(prev, np.maximum(u_arr, prev), history)
            out = 1.0 - np.exp(-mass)
            return out if np.ndim(u) else float(out[0])

        step_val = scores[i](pdf, cdf, float(t[i]))
        if math.isinf(step_val):
            return math.inf
        total += step_val
        prev = float(t[i])

    survival = float(np.exp(-f.mass_between(prev, np.asarray(pattern.horizon), t)))
    return total + tail_score(survival)


def interval_reports_from_cond_intensity(f: CondIntensityForecast,
                                         partition: IntervalPartition,
                                         pattern: TemporalPattern) -> IntervalProbForecast:
    """p_i = 1 - exp(-∫_{a_i}^{b_i} λ*(t | t_j < a_i) dt), history frozen per interval.

    An interval mass beyond ~36.7 makes 1 - exp(-mass) round to 1.0 in double
    precision; such probabilities are clipped to the largest double below 1 so
    the report stays inside the open unit interval.
    """
    masses = f.interval_masses(partition, pattern)
    probs = np.minimum(-np.expm1(-masses), np.nextafter(1.0, 0.0))
    return IntervalProbForecast(probs, partition)


def score_interval(f: IntervalProbForecast, pattern: TemporalPattern) -> float:
    """Σ_i binary log score of p_i against 1{interval i occupied}."""
    counts = count_in_intervals(pattern, f.partition)
    occupied = counts > 0
    return float(-np.sum(np.where(occupied, np.log(f.probs), np.log1p(-f.probs))))


def temporal_correction_term(pattern: TemporalPattern,
                             partition: IntervalPartition) -> float:
    """Σ over occupied intervals of log(b_i - a_i) (forecast-independent)."""
    if len(pattern) == 0:
        return 0.0
    occupied = np.unique(partition.interval_index(pattern.times))
    return float(np.log(partition.lengths[occupied]).sum())


def information_gain(p: IntervalProbForecast, q: IntervalProbForecast,
                     pattern: TemporalPattern) -> float:
    """T⁻¹ Σ_i [X_i log(p_i/q_i) + (1-X_i) log((1-p_i)/(1-q_i))].

    Equals T⁻¹ (score_interval(q, φ) - score_interval(p, φ)); q is the
    reference forecast.
    """
    if p.partition != q.partition:
        raise ValueError("forecasts must share one interval partition")
    counts = count_in_intervals(pattern, p.partition)
    x = counts > 0
    terms = np.where(
        x,
        np.log(p.probs) - np.log(q.probs),
        np.log1p(-p.probs) - np.log1p(-q.probs),
    )
    return float(terms.sum()) / pattern.horizon


def _effective_lag(trigger, eps: float = 1e-14) -> float:
    """Lag beyond which the kernel is numerically negligible."""
    base = float(np.asarray(trigger.value(np.array([0.0])))[0])
    if base <= 0.0:
        return 0.0
    lag = 1.0
    while float(np.asarray(trigger.value(np.array([lag])))[0]) > eps * base and lag < 1e6:
        lag *= 2.0
    return lag


def estimate_entropy_gain(f: CondIntensityForecast, horizon: float, seed: RngLike,
                          grid_step: float = 0.01) -> float:
    """Ergodic estimate of E[λ*(0) log λ*(0)] - λ̄ log λ̄ along one long path.

    λ̄ is the path-average rate (compensator over the horizon divided by the
    horizon).  The config is validated for subcriticality before simulating.
    """
    config = HawkesConfig(f.background, f.trigger, float(horizon))
    path = sample_hawkes(config, seed)
    events = path.times

    n_grid = int(np.ceil(horizon / grid_step))
    mids = (np.arange(n_grid) + 0.5) * (horizon / n_grid)
    lag = _effective_lag(f.trigger)

    rates = np.full(n_grid, float(f.background))
    if events.size and lag > 0.0:
        hi = np.searchsorted(events, mids, side="left")
        lo = np.searchsorted(events, mids - lag, side="left")
        width = int(np.max(hi - lo)) if n_grid else 0
        chunk = max(1, 2_000_000 // max(width, 1))
        for start in range(0, n_grid, chunk):
            sl = slice(start, min(start + chunk, n_grid))
            h = hi[sl]
            idx = h[:, None] - 1 - np.arange(width)[None, :]
            valid = idx >= lo[sl][:, None]
            idx = np.clip(idx, 0, events.size - 1)
            lags = mids[sl][:, None] - events[idx]
            vals = np.asarray(f.trigger.value(lags), dtype=float)
            rates[sl] += np.where(valid, vals, 0.0).sum(axis=1)

    mean_ent = float(np.mean(rates * np.log(rates)))
    lam_bar = f.compensator(path) / float(horizon)
    return mean_ent - lam_bar * math.log(lam_bar)


# ---------------------------------------------------------------------------
# Hyvärinen-type score
# ---------------------------------------------------------------------------

def hyvarinen_pp_score(grad_log_j: Callable, laplacian_log_j: Callable,
                       pattern: SpatialPattern) -> float:
    """Δ log j_n + ½ ‖∇ log j_n‖² at the stacked coordinates; 0 when empty.

    Both callbacks receive the (n, d) point array; the gradient callback
    returns the per-coordinate gradient of log j_n (any shape with n·d
    entries), the Laplacian callback its trace second derivative.  Scaling
    j_n by a constant changes neither callback, so the score is 0-homogeneous
    by construction.
    """
    if len(pattern) == 0:
        return 0.0
    grad = np.asarray(grad_log_j(pattern.points), dtype=float).ravel()
    expected = pattern.points.size
    if grad.size != expected:
        raise ValueError(f"gradient callback returned {grad.size} values, expected {expected}")
    lap = float(laplacian_log_j(pattern.points))
    return lap + 0.5 * float(np.dot(grad, grad))
