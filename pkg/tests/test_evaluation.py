"""Score comparison, preference tables, and the simulation-study drivers."""

import math

import numpy as np
import pytest

from ppscores.catalog import (
    DataModel,
    build_forecast,
    build_model,
)
from ppscores.evaluation import (
    avg_score_difference,
    dm_test,
    preference_from_scores,
    run_convergence_spatial,
    run_convergence_temporal,
    run_hawkes_experiment,
    run_preference_experiment,
)
from ppscores.catalog import UNIT_SQUARE
from ppscores.pp_scores import IntensityForecast, score_intensity_combined
from ppscores.simulate import HawkesConfig, ZeroTrigger, sample_hawkes


# ---------------------------------------------------------------------------
# mean score differences
# ---------------------------------------------------------------------------

class TestAvgScoreDifference:
    def test_identical_series(self):
        a = np.array([1.0, 2.0, 3.0])
        assert avg_score_difference(a, a) == (0.0, 0)

    def test_matches_direct_mean(self):
        rng = np.random.default_rng(60)
        a, b = rng.normal(size=50), rng.normal(size=50)
        delta, excluded = avg_score_difference(a, b)
        assert excluded == 0
        assert delta == pytest.approx(float(np.mean(a - b)), abs=1e-15)

    def test_antisymmetry(self):
        rng = np.random.default_rng(61)
        a, b = rng.normal(size=20), rng.normal(size=20)
        assert avg_score_difference(a, b)[0] == pytest.approx(
            -avg_score_difference(b, a)[0], abs=1e-15
        )

    def test_non_finite_pairs_excluded(self):
        delta, excluded = avg_score_difference(
            [1.0, math.inf, 3.0], [1.0, 2.0, math.nan]
        )
        assert delta == 0.0
        assert excluded == 2

    def test_all_excluded_yields_nan(self):
        delta, excluded = avg_score_difference([math.inf] * 3, [1.0, 2.0, 3.0])
        assert math.isnan(delta)
        assert excluded == 3

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError):
            avg_score_difference([1.0, 2.0], [1.0])


# ---------------------------------------------------------------------------
# paired comparison test
# ---------------------------------------------------------------------------

class TestDmTest:
    def test_hand_computed_statistic(self):
        r = dm_test(np.array([1.0, 2.0, 3.0, 4.0]), np.zeros(4))
        assert r.n == 4
        assert r.delta == pytest.approx(2.5)
        # sqrt(4) * 2.5 / sqrt(5/3)
        assert r.stat == pytest.approx(5.0 / math.sqrt(5.0 / 3.0), rel=1e-14)
        assert r.p_value == pytest.approx(
            math.erfc(abs(r.stat) / math.sqrt(2.0)), rel=1e-13
        )
        assert r.decision == "b"
        assert not r.degenerate

    def test_direction_labels(self):
        assert dm_test(np.zeros(4), np.array([1.0, 2.0, 3.0, 4.0])).decision == "a"

    @pytest.mark.parametrize(
        "a,b",
        [
            (np.zeros(5), np.zeros(5)),
            (np.full(5, 2.0), np.full(5, 1.0)),
            (np.array([1.0]), np.array([0.0])),
        ],
        ids=["all-zero", "constant-diff", "single-obs"],
    )
    def test_degenerate_inputs(self, a, b):
        r = dm_test(a, b)
        assert r.degenerate
        assert r.decision == "none"
        assert math.isnan(r.stat) and math.isnan(r.p_value)

    def test_scale_equivariance_power_of_two(self):
        rng = np.random.default_rng(62)
        a, b = rng.normal(size=40), rng.normal(size=40)
        base, scaled = dm_test(a, b), dm_test(4.0 * a, 4.0 * b)
        assert scaled.stat == base.stat
        assert scaled.p_value == base.p_value
        assert scaled.decision == base.decision

    def test_validation(self):
        a, b = np.zeros(4), np.zeros(4)
        for alpha in (0.0, 1.0, -0.1, 1.5):
            with pytest.raises(ValueError):
                dm_test(a, b, alpha)
        with pytest.raises(ValueError):
            dm_test(np.zeros(3), np.zeros(4))
        with pytest.raises(ValueError):
            dm_test(np.array([1.0, math.inf]), np.zeros(2))
        with pytest.raises(ValueError):
            dm_test(np.array([1.0, math.nan]), np.zeros(2))

    def test_type_one_error_calibration(self):
        # equal-skill forecasts, n=500: two-sided rejection at 5% should
        # land near 5%, split symmetrically between the two directions
        rng = np.random.default_rng(63)
        trials = 10_000
        rej_a = rej_b = below = 0
        for _ in range(trials):
            a = rng.normal(size=500)
            b = rng.normal(size=500)
            r = dm_test(a, b, 0.05)
            below += r.p_value < 0.05
            rej_a += r.decision == "a"
            rej_b += r.decision == "b"
        assert abs(below / trials - 0.05) < 0.008
        assert 0.015 < rej_a / trials < 0.036
        assert 0.015 < rej_b / trials < 0.036


# ---------------------------------------------------------------------------
# preference tables from score arrays
# ---------------------------------------------------------------------------

class TestPreferenceFromScores:
    def test_identical_forecasts_never_preferred(self):
        rng = np.random.default_rng(64)
        scores = np.repeat(rng.normal(size=(6, 15, 1)), 2, axis=2)
        t = preference_from_scores(scores, ["a", "b"])
        assert t.entry("a", "b") == 0.0
        assert t.entry("b", "a") == 0.0
        assert math.isnan(t.fraction[0, 0])
        assert all(rec.decision == "none" for rec in t.records)

    def test_complementarity_bound(self):
        rng = np.random.default_rng(65)
        scores = rng.normal(size=(40, 20, 3))
        scores[:, :, 2] += 0.8
        t = preference_from_scores(scores, ["a", "b", "c"])
        for i in ("a", "b", "c"):
            for j in ("a", "b", "c"):
                if i != j:
                    assert t.entry(i, j) + t.entry(j, i) <= 1.0 + 1e-12

    def test_drop_accounting(self):
        rng = np.random.default_rng(66)
        scores = rng.normal(size=(4, 10, 2))
        scores[1, 3, 0] = math.inf
        t = preference_from_scores(scores, ["a", "b"])
        assert t.dropped[0, 1] == 1 and t.dropped[1, 0] == 1
        assert t.max_drop_rate() == pytest.approx(0.25)
        dropped_records = [r for r in t.records if r.decision == "dropped"]
        assert len(dropped_records) == 1
        assert dropped_records[0].rep == 1
        # fractions keep the full-rep denominator
        assert t.entry("a", "b") in {0.0, 0.25, 0.5, 0.75, 1.0}

    def test_one_sided_rejects_at_least_as_often(self):
        rng = np.random.default_rng(67)
        scores = rng.normal(size=(60, 25, 2))
        scores[:, :, 1] += 0.3
        one = preference_from_scores(scores, ["a", "b"], sided="one")
        two = preference_from_scores(scores, ["a", "b"], sided="two")
        assert one.entry("a", "b") >= two.entry("a", "b")
        assert one.entry("a", "b") > 0.0

    def test_null_per_direction_level(self):
        # directional testing at alpha=0.05 with 20 patterns per rep sits
        # near 6% per direction once the t-vs-normal inflation is counted
        rng = np.random.default_rng(68)
        scores = rng.normal(size=(400, 20, 2))
        t = preference_from_scores(scores, ["a", "b"])
        for pair in (("a", "b"), ("b", "a")):
            assert 0.015 < t.entry(*pair) < 0.12

    def test_validation(self):
        with pytest.raises(ValueError):
            preference_from_scores(np.zeros((3, 4)), ["a", "b"])
        with pytest.raises(ValueError):
            preference_from_scores(np.zeros((3, 4, 2)), ["a"])
        with pytest.raises(ValueError):
            preference_from_scores(np.zeros((3, 4, 2)), ["a", "b"], sided="three")
        with pytest.raises(ValueError):
            preference_from_scores(np.zeros((0, 4, 2)), ["a", "b"])


# ---------------------------------------------------------------------------
# preference experiment driver
# ---------------------------------------------------------------------------

def _scorer(forecast, pattern):
    return score_intensity_combined(forecast, pattern, c=0.1)


class TestRunPreferenceExperiment:
    def _forecasts(self, *names):
        return [(n, build_forecast("intensity", n)) for n in names]

    def test_parallel_runs_match_serial(self):
        model = build_model("poisson")
        fcs = self._forecasts("f0", "f1")
        kw = dict(reps=8, patterns_per_rep=10, master_seed=5)
        serial = run_preference_experiment(model, fcs, _scorer, n_jobs=1, **kw)
        parallel = run_preference_experiment(model, fcs, _scorer, n_jobs=2, **kw)
        assert np.array_equal(serial.scores, parallel.scores)
        assert np.array_equal(
            serial.fraction, parallel.fraction, equal_nan=True
        )

    def test_deterministic_in_master_seed(self):
        model = build_model("poisson")
        fcs = self._forecasts("f0", "f1")
        kw = dict(reps=6, patterns_per_rep=8)
        a = run_preference_experiment(model, fcs, _scorer, master_seed=5, **kw)
        b = run_preference_experiment(model, fcs, _scorer, master_seed=5, **kw)
        c = run_preference_experiment(model, fcs, _scorer, master_seed=6, **kw)
        assert np.array_equal(a.scores, b.scores)
        assert not np.array_equal(a.scores, c.scores)

    def test_truth_dominates_far_alternative(self):
        # the data-generating intensity versus the most distorted competitor
        model = build_model("poisson")
        fcs = self._forecasts("f0", "f5")
        t = run_preference_experiment(
            model, fcs, _scorer, reps=30, patterns_per_rep=20, master_seed=41
        )
        assert t.names == ("f0", "f5")
        assert t.entry("f0", "f5") >= 0.9
        assert t.entry("f5", "f0") <= 0.1
        assert t.max_drop_rate() == 0.0


# ---------------------------------------------------------------------------
# convergence drivers
# ---------------------------------------------------------------------------

def _const_density(value):
    return lambda s: np.full(np.asarray(s).shape[:-1], float(value))


class TestRunConvergenceSpatial:
    def test_constant_forecast_whole_window_reduction(self):
        # with one cell and a flat forecast the binned score, its
        # correction, and the mass shift cancel the exact score identically
        model = build_model("poisson")
        fc = IntensityForecast(_const_density(30.0), UNIT_SQUARE)
        rows = run_convergence_spatial(
            model, [("const", fc)], [1], reps=20, master_seed=9
        )
        assert len(rows) == 1
        assert rows[0].n == 1 and rows[0].forecast == "const"
        assert abs(rows[0].mean_corrected_diff) < 1e-9

    def test_row_grid_and_reuse_across_n(self):
        model = build_model("poisson")
        fcs = [(n, build_forecast("intensity", n)) for n in ("f0", "f1")]
        both = run_convergence_spatial(model, fcs, [1, 3], reps=5, master_seed=10)
        assert {(r.n, r.forecast) for r in both} == {
            (1, "f0"), (1, "f1"), (3, "f0"), (3, "f1")
        }
        only3 = run_convergence_spatial(model, fcs, [3], reps=5, master_seed=10)
        got = {(r.n, r.forecast): r.mean_corrected_diff for r in both}
        for r in only3:
            assert got[(3, r.forecast)] == r.mean_corrected_diff


def _homogeneous_expected_diff(n, nu_true, nu_fc, horizon):
    """Closed-form mean corrected difference for constant-rate truth/forecast.

    Derived by integrating the occupancy score of a Poisson count in each
    of the n equal bins against the exact log-density score.
    """
    d = horizon / n
    mt, mf = nu_true * d, nu_fc * d
    hit = -math.expm1(-mt)  # P(bin occupied)
    return n * (
        -hit * math.log(-math.expm1(-mf))
        + mf * math.exp(-mt)
        + hit * math.log(d)
        + mt * math.log(nu_fc)
        - mf
    )


@pytest.fixture(scope="module")
def homog_rows():
    def sampler(rng, count):
        cfg = HawkesConfig(4.0, ZeroTrigger(), 50.0)
        return [sample_hawkes(cfg, rng) for _ in range(count)]

    model = DataModel("homog4", "temporal", sampler)
    fc = [("poisson", build_forecast("temporal", "poisson"))]
    rows = run_convergence_temporal(
        model, fc, [5, 50, 1000], reps=400, master_seed=7
    )
    return {r.n: r.mean_corrected_diff for r in rows}


class TestRunConvergenceTemporal:
    @pytest.mark.parametrize(
        "n,rel_tol",
        [(5, 0.025), (50, 0.025), (1000, 0.08)],
        ids=["n5", "n50", "n1000"],
    )
    def test_matches_closed_form(self, homog_rows, n, rel_tol):
        expected = _homogeneous_expected_diff(n, 4.0, 2.0, 50.0)
        assert homog_rows[n] == pytest.approx(expected, rel=rel_tol)

    def test_deterministic(self):
        def sampler(rng, count):
            cfg = HawkesConfig(4.0, ZeroTrigger(), 50.0)
            return [sample_hawkes(cfg, rng) for _ in range(count)]

        model = DataModel("homog4", "temporal", sampler)
        fc = [("poisson", build_forecast("temporal", "poisson"))]
        a = run_convergence_temporal(model, fc, [5], reps=30, master_seed=7)
        b = run_convergence_temporal(model, fc, [5], reps=30, master_seed=7)
        assert a[0].mean_corrected_diff == b[0].mean_corrected_diff


# ---------------------------------------------------------------------------
# self-exciting study driver
# ---------------------------------------------------------------------------

@pytest.fixture(scope="module")
def small_result():
    model = build_model("hawkes-f1", horizon=20.0)
    fcs = [
        ("f1", build_forecast("temporal", "f1")),
        ("poisson", build_forecast("temporal", "poisson")),
    ]
    return run_hawkes_experiment(
        model, fcs, reps=20, master_seed=3, interval_n=200
    )


class TestRunHawkesExperiment:
    def test_shapes_and_reference_default(self, small_result):
        res = small_result
        assert res.names == ("f1", "poisson")
        assert res.reference == "f1"
        assert res.exact.shape == (20, 2)
        assert res.interval.shape == (20, 2)
        assert res.infogain.shape == (20, 2)
        assert res.interval_n == 200
        assert np.all(np.isfinite(res.exact))

    def test_reference_column_has_zero_information_gain(self, small_result):
        assert np.all(small_result.infogain[:, 0] == 0.0)

    def test_truth_beats_memoryless_competitor(self, small_result):
        assert small_result.median_margin("poisson", "f1") > 0.0
        assert 0.0 <= small_result.agreement <= 1.0

    def test_reference_override_and_validation(self):
        model = build_model("hawkes-f1", horizon=10.0)
        fcs = [
            ("f1", build_forecast("temporal", "f1")),
            ("poisson", build_forecast("temporal", "poisson")),
        ]
        res = run_hawkes_experiment(
            model, fcs, reps=4, master_seed=3, interval_n=50, reference="poisson"
        )
        assert res.reference == "poisson"
        assert np.all(res.infogain[:, 1] == 0.0)
        with pytest.raises(ValueError):
            run_hawkes_experiment(
                model, fcs, reps=2, master_seed=3, reference="zzz"
            )

    def test_deterministic(self):
        model = build_model("hawkes-f1", horizon=10.0)
        fcs = [("f1", build_forecast("temporal", "f1"))]
        a = run_hawkes_experiment(model, fcs, reps=5, master_seed=8, interval_n=50)
        b = run_hawkes_experiment(model, fcs, reps=5, master_seed=8, interval_n=50)
        assert np.array_equal(a.exact, b.exact)
        assert np.array_equal(a.interval, b.interval)
