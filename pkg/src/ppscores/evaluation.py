"""Forecast comparison harness.

Builds on the scoring ops: Diebold-Mariano-style tests on per-pattern score
differences, Monte Carlo preference tables over a forecast catalog,
bin/interval refinement convergence experiments, and the temporal ranking
experiment comparing exact and interval-based scores.

Reproducibility contract: repetition r always draws from the stream
(master_seed, r) regardless of worker count, and results are reduced in
repetition order, so outputs are bitwise identical for any n_jobs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed
from scipy.special import erfc

from .catalog import DataModel
from .patterns import GridPartition, IntervalPartition
from .pp_scores import (
    IntensityForecast,
    bin_reports_from_intensity,
    information_gain,
    interval_reports_from_cond_intensity,
    score_bin,
    score_cond_intensity_log,
    score_intensity_poisson,
    score_interval,
    spatial_correction_term,
    temporal_correction_term,
)
from .simulate import SeedSpec

__all__ = [
    "avg_score_difference",
    "DmResult",
    "DmRecord",
    "dm_test",
    "PreferenceTable",
    "preference_from_scores",
    "run_preference_experiment",
    "ConvergenceRow",
    "run_convergence_spatial",
    "run_convergence_temporal",
    "HawkesExperimentResult",
    "run_hawkes_experiment",
]


def avg_score_difference(scores_a, scores_b) -> tuple[float, int]:
    """Mean of (a - b) over repetitions where both scores are finite.

    Returns (delta, n_excluded); an all-excluded comparison yields nan.
    Negative delta means A scored lower (better) on average.
    """
    a = np.asarray(scores_a, dtype=float).ravel()
    b = np.asarray(scores_b, dtype=float).ravel()
    if a.size != b.size:
        raise ValueError(f"length mismatch: {a.size} vs {b.size}")
    keep = np.isfinite(a) & np.isfinite(b)
    excluded = int(a.size - keep.sum())
    if not keep.any():
        return math.nan, excluded
    return float((a[keep] - b[keep]).mean()), excluded


# ---------------------------------------------------------------------------
# Diebold-Mariano test on score differences
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DmResult:
    """Two-sided test of mean score difference A - B against zero."""

    n: int
    delta: float
    stat: float
    p_value: float
    decision: str  # "a" | "b" | "none"
    degenerate: bool


def dm_test(scores_a, scores_b, alpha: float = 0.05) -> DmResult:
    """Compare paired score series; lower scores are better.

    decision "a" means A is significantly preferred (delta < 0 with p < alpha).
    Zero-variance or too-short series yield a degenerate no-decision result.
    Non-finite inputs are rejected: explosion filtering is the caller's job.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    a = np.asarray(scores_a, dtype=float).ravel()
    b = np.asarray(scores_b, dtype=float).ravel()
    if a.size != b.size:
        raise ValueError(f"length mismatch: {a.size} vs {b.size}")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise ValueError("scores must be finite; filter non-finite repetitions first")
    n = a.size
    diffs = a - b
    delta = float(diffs.mean()) if n else math.nan
    if n < 2:
        return DmResult(n, delta, math.nan, math.nan, "none", True)
    sd = float(diffs.std(ddof=1))
    if sd == 0.0:
        return DmResult(n, delta, math.nan, math.nan, "none", True)
    stat = math.sqrt(n) * delta / sd
    p_value = float(erfc(abs(stat) / math.sqrt(2.0)))
    if p_value < alpha:
        decision = "a" if delta < 0.0 else "b"
    else:
        decision = "none"
    return DmResult(n, delta, stat, p_value, decision, False)


@dataclass(frozen=True)
class DmRecord:
    """One pairwise comparison within one repetition (for the dm CSV)."""

    rep: int
    forecast_a: str
    forecast_b: str
    delta: float
    stat: float
    p_value: float
    decision: str  # "a" | "b" | "none" | "dropped"


# ---------------------------------------------------------------------------
# preference tables
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PreferenceTable:
    """fraction[i, j]: share of repetitions significantly preferring i over j."""

    names: Tuple[str, ...]
    fraction: np.ndarray
    counts: np.ndarray
    dropped: np.ndarray
    reps: int
    records: Tuple[DmRecord, ...]
    scores: np.ndarray  # (reps, patterns_per_rep, n_forecasts) raw scores

    def max_drop_rate(self) -> float:
        return float(self.dropped.max()) / self.reps if self.reps else 0.0

    def entry(self, row: str, col: str) -> float:
        return float(self.fraction[self.names.index(row), self.names.index(col)])


def preference_from_scores(scores: np.ndarray, names: Sequence[str],
                           alpha: float = 0.05,
                           sided: str = "one") -> PreferenceTable:
    """Reduce a (reps, patterns, forecasts) score array to a preference table.

    Within each repetition every unordered forecast pair is tested on the
    per-pattern score differences; a repetition with any non-finite score for
    a pair is dropped for that pair (and counted).  Fractions always divide by
    the full repetition count.

    sided="one" (default) declares a preference when the directional test
    rejects at level alpha, i.e. the two-sided p-value is below 2*alpha with
    the matching sign; sided="two" requires the two-sided test itself to
    reject at alpha.
    """
    if sided not in ("one", "two"):
        raise ValueError(f"sided must be 'one' or 'two', got {sided!r}")
    eff_alpha = min(2.0 * alpha, 1.0 - 1e-12) if sided == "one" else alpha
    scores = np.asarray(scores, dtype=float)
    if scores.ndim != 3:
        raise ValueError(f"expected (reps, patterns, forecasts) array, got {scores.shape}")
    reps, _, n_forecasts = scores.shape
    if n_forecasts != len(names):
        raise ValueError(f"{n_forecasts} score columns for {len(names)} names")
    if reps < 1:
        raise ValueError("need at least one repetition")

    counts = np.zeros((n_forecasts, n_forecasts), dtype=np.int64)
    dropped = np.zeros((n_forecasts, n_forecasts), dtype=np.int64)
    records: List[DmRecord] = []
    finite = np.isfinite(scores)
    for r in range(reps):
        mat = scores[r]
        fin = finite[r]
        for i in range(n_forecasts):
            for j in range(i + 1, n_forecasts):
                if not bool(np.all(fin[:, i] & fin[:, j])):
                    dropped[i, j] += 1
                    dropped[j, i] += 1
                    records.append(DmRecord(r, names[i], names[j],
                                            math.nan, math.nan, math.nan, "dropped"))
                    continue
                res = dm_test(mat[:, i], mat[:, j], eff_alpha)
                if res.decision == "a":
                    counts[i, j] += 1
                elif res.decision == "b":
                    counts[j, i] += 1
                records.append(DmRecord(r, names[i], names[j],
                                        res.delta, res.stat, res.p_value, res.decision))

    fraction = counts / float(reps)
    np.fill_diagonal(fraction, math.nan)
    return PreferenceTable(tuple(names), fraction, counts, dropped, reps,
                           tuple(records), scores)


def _parallel_map(task: Callable[[int], object], count: int, n_jobs: int) -> list:
    if n_jobs in (None, 1):
        return [task(r) for r in range(count)]
    return Parallel(n_jobs=n_jobs)(delayed(task)(r) for r in range(count))


def run_preference_experiment(model: DataModel,
                              forecasts: Sequence[Tuple[str, object]],
                              scorer: Callable[[object, object], float],
                              *,
                              reps: int,
                              patterns_per_rep: int,
                              master_seed: int,
                              alpha: float = 0.05,
                              sided: str = "one",
                              n_jobs: int = 1) -> PreferenceTable:
    """Sample, score, and reduce: the full Monte Carlo preference experiment.

    scorer(forecast_obj, pattern) -> float may return +inf for explosions;
    those repetitions are dropped pairwise during reduction.
    """
    names = [name for name, _ in forecasts]
    objs = [obj for _, obj in forecasts]

    def task(r: int) -> np.ndarray:
        patterns = model.sample(SeedSpec(master_seed, r), patterns_per_rep)
        return np.array([[scorer(obj, pattern) for obj in objs] for pattern in patterns],
                        dtype=float)

    rows = _parallel_map(task, reps, n_jobs)
    scores = np.stack(rows, axis=0)
    return preference_from_scores(scores, names, alpha, sided)


# ---------------------------------------------------------------------------
# refinement convergence experiments
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConvergenceRow:
    """Mean of (partition-based score + correction - exact score) at one n."""

    n: int
    forecast: str
    mean_corrected_diff: float


def run_convergence_spatial(model: DataModel,
                            forecasts: Sequence[Tuple[str, IntensityForecast]],
                            n_values: Sequence[int],
                            *,
                            reps: int,
                            master_seed: int,
                            patterns_per_rep: int = 1,
                            degree: int = 8) -> List[ConvergenceRow]:
    """Corrected binned score minus exact score, averaged over repetitions.

    Within a repetition the same patterns are scored at every resolution, so
    the n-profile is driven by discretization alone.  The exact score's mass
    term is evaluated as the sum of the same per-cell quadrature masses that
    feed the binned score: the total-mass contribution then cancels in the
    difference, which makes the difference exactly invariant under scaling
    the intensity by a constant (forecasts that are scalar multiples of each
    other produce identical curves).
    """
    window = forecasts[0][1].window
    partitions = {n: GridPartition(window, int(n)) for n in n_values}
    bins = {
        (name, n): bin_reports_from_intensity(f.density, partitions[n], degree)
        for name, f in forecasts
        for n in n_values
    }
    mass_shift = {
        (name, n): f.mass - float(bins[(name, n)].values.sum())
        for name, f in forecasts
        for n in n_values
    }

    total = {(n, name): 0.0 for n in n_values for name, _ in forecasts}
    draws = 0
    for r in range(reps):
        patterns = model.sample(SeedSpec(master_seed, r), patterns_per_rep)
        for pattern in patterns:
            draws += 1
            corrections = {n: spatial_correction_term(pattern, partitions[n])
                           for n in n_values}
            for name, f in forecasts:
                exact = score_intensity_poisson(f, pattern)
                for n in n_values:
                    corrected = score_bin(bins[(name, n)], pattern) + corrections[n]
                    total[(n, name)] += corrected - exact + mass_shift[(name, n)]

    return [
        ConvergenceRow(int(n), name, total[(n, name)] / draws)
        for n in n_values
        for name, _ in forecasts
    ]


def run_convergence_temporal(model: DataModel,
                             forecasts: Sequence[Tuple[str, object]],
                             n_values: Sequence[int],
                             *,
                             reps: int,
                             master_seed: int,
                             n_jobs: int = 1) -> List[ConvergenceRow]:
    """Corrected interval score minus exact score, averaged over repetitions."""
    def task(r: int) -> np.ndarray:
        pattern = model.sample(SeedSpec(master_seed, r), 1)[0]
        parts = {n: IntervalPartition.equal(pattern.horizon, int(n)) for n in n_values}
        corrections = {n: temporal_correction_term(pattern, parts[n]) for n in n_values}
        out = np.empty((len(forecasts), len(n_values)))
        for fi, (_, f) in enumerate(forecasts):
            exact = score_cond_intensity_log(f, pattern)
            for ni, n in enumerate(n_values):
                reports = interval_reports_from_cond_intensity(f, parts[n], pattern)
                out[fi, ni] = score_interval(reports, pattern) + corrections[n] - exact
        return out

    mats = _parallel_map(task, reps, n_jobs)
    mean = np.mean(np.stack(mats, axis=0), axis=0)
    return [
        ConvergenceRow(int(n), forecasts[fi][0], float(mean[fi, ni]))
        for ni, n in enumerate(n_values)
        for fi in range(len(forecasts))
    ]


# ---------------------------------------------------------------------------
# temporal exact-vs-interval ranking experiment
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HawkesExperimentResult:
    """Per-repetition exact and interval scores plus ranking agreement."""

    names: Tuple[str, ...]
    exact: np.ndarray       # (reps, forecasts) exact log scores
    interval: np.ndarray    # (reps, forecasts) interval scores at interval_n
    infogain: np.ndarray    # (reps, forecasts) information gain vs reference
    reference: str
    agreement: float        # share of reps where full rankings coincide
    interval_n: int

    def median_margin(self, competitor: str, baseline: str) -> float:
        """Median over reps of exact(competitor) - exact(baseline)."""
        ci = self.names.index(competitor)
        bi = self.names.index(baseline)
        return float(np.median(self.exact[:, ci] - self.exact[:, bi]))


def run_hawkes_experiment(model: DataModel,
                          forecasts: Sequence[Tuple[str, object]],
                          *,
                          reps: int,
                          master_seed: int,
                          interval_n: int = 1000,
                          reference: Optional[str] = None,
                          n_jobs: int = 1) -> HawkesExperimentResult:
    """Score one path per repetition with every forecast, exactly and on bins."""
    names = tuple(name for name, _ in forecasts)
    objs = [obj for _, obj in forecasts]
    ref_name = reference if reference is not None else names[0]
    ref_idx = names.index(ref_name)

    def task(r: int) -> np.ndarray:
        pattern = model.sample(SeedSpec(master_seed, r), 1)[0]
        partition = IntervalPartition.equal(pattern.horizon, interval_n)
        reports = [interval_reports_from_cond_intensity(f, partition, pattern)
                   for f in objs]
        exact_row = [score_cond_intensity_log(f, pattern) for f in objs]
        interval_row = [score_interval(rep, pattern) for rep in reports]
        ref_report = reports[ref_idx]
        ig_row = [information_gain(rep, ref_report, pattern) for rep in reports]
        return np.array([exact_row, interval_row, ig_row])

    stacked = np.stack(_parallel_map(task, reps, n_jobs), axis=0)
    exact = stacked[:, 0, :]
    interval = stacked[:, 1, :]
    infogain = stacked[:, 2, :]
    same = np.all(np.argsort(exact, axis=1) == np.argsort(interval, axis=1), axis=1)
    return HawkesExperimentResult(names, exact, interval, infogain, ref_name,
                                  float(same.mean()), int(interval_n))
