"""Samplers and triggering kernels, checked against closed forms and MC stats."""

import math

import numpy as np
import pytest
from scipy import integrate

from ppscores.catalog import UNIT_SQUARE, build_model
from ppscores.patterns import TemporalPattern, unit_square
from ppscores.simulate import (
    ExponentialTrigger,
    GaussianTrigger,
    GenericTrigger,
    HawkesConfig,
    IndicatorTrigger,
    LgcpConfig,
    LinearTrigger,
    SeedSpec,
    ThomasConfig,
    ZeroTrigger,
    adaptive_simpson,
    lgcp_factorization_count,
    sample_hawkes,
    sample_lgcp,
    sample_lgcp_batch,
    sample_poisson_inhom,
    sample_thomas,
)

F0_MASS = 22.9558715  # integral of 30*sqrt(x^2+y^2) over the unit square


# ---------------------------------------------------------------------------
# seeding
# ---------------------------------------------------------------------------

class TestSeedSpec:
    def test_same_spec_same_stream(self):
        a = SeedSpec(123, 7).generator().random(5)
        b = SeedSpec(123, 7).generator().random(5)
        assert np.array_equal(a, b)

    def test_rep_index_changes_stream(self):
        a = SeedSpec(123, 0).generator().random(5)
        b = SeedSpec(123, 1).generator().random(5)
        assert not np.array_equal(a, b)

    def test_validation(self):
        with pytest.raises(ValueError):
            SeedSpec(-1, 0)
        with pytest.raises(ValueError):
            SeedSpec(0, -2)


# ---------------------------------------------------------------------------
# quadrature helper
# ---------------------------------------------------------------------------

class TestAdaptiveSimpson:
    def test_sine(self):
        assert adaptive_simpson(math.sin, 0.0, math.pi) == pytest.approx(2.0, abs=1e-8)

    def test_parabola(self):
        assert adaptive_simpson(lambda t: t * t, 0.0, 1.0) == pytest.approx(1 / 3, abs=1e-10)

    def test_empty_interval(self):
        assert adaptive_simpson(math.sin, 2.0, 2.0) == 0.0


# ---------------------------------------------------------------------------
# triggering kernels
# ---------------------------------------------------------------------------

class TestTriggers:
    def test_exponential_mass_and_cumulative(self):
        g = ExponentialTrigger(2.0, 4.0)
        assert g.mass == pytest.approx(0.5)
        assert g.value(0.0) == pytest.approx(2.0)
        for t in (0.1, 0.5, 3.0):
            assert g.cumulative(t) == pytest.approx(0.5 * (1 - math.exp(-4 * t)), abs=1e-12)

    def test_gaussian_mass_and_cumulative(self):
        g = GaussianTrigger(2.0, 4.5)
        assert g.mass == pytest.approx(math.sqrt(math.pi / 4.5), abs=1e-12)
        for t in (0.05, 0.3, 1.0):
            brute = integrate.quad(lambda u: 2.0 * math.exp(-4.5 * u * u), 0.0, t)[0]
            assert g.cumulative(t) == pytest.approx(brute, abs=1e-9)

    def test_linear_support_and_mass(self):
        g = LinearTrigger(8.0, 12.0)
        assert g.support == pytest.approx(2.0 / 3.0)
        assert g.mass == pytest.approx(8.0 / 3.0)
        assert g.value(0.5) == pytest.approx(2.0)
        assert g.value(1.0) == 0.0
        assert g.cumulative(10.0) == pytest.approx(g.mass)

    def test_indicator(self):
        g = IndicatorTrigger(1.0, 0.8)
        assert g.mass == pytest.approx(0.8)
        assert g.cumulative(0.5) == pytest.approx(0.5)
        assert g.cumulative(2.0) == pytest.approx(0.8)
        assert g.value(0.79) == 1.0
        assert g.value(0.81) == 0.0

    def test_generic_matches_exponential(self):
        exact = ExponentialTrigger(2.0, 4.0)
        generic = GenericTrigger(lambda t: 2.0 * math.exp(-4.0 * t), 10.0)
        assert generic.mass == pytest.approx(exact.mass, abs=1e-7)
        for t in (0.1, 0.5, 2.0):
            assert generic.cumulative(t) == pytest.approx(exact.cumulative(t), abs=1e-7)
            assert generic.value(t) == pytest.approx(exact.value(t))

    def test_zero_trigger(self):
        g = ZeroTrigger()
        assert g.mass == 0.0
        assert g.value(1.0) == 0.0
        assert g.cumulative(5.0) == 0.0

    @pytest.mark.parametrize(
        "trigger",
        [
            ExponentialTrigger(2.0, 4.0),
            GaussianTrigger(2.0, 4.5),
            LinearTrigger(8.0, 12.0),
            IndicatorTrigger(1.0, 0.8),
        ],
    )
    def test_no_mass_before_zero(self, trigger):
        assert trigger.value(-0.5) == 0.0
        assert float(np.asarray(trigger.cumulative(-1.0))) == 0.0

    @pytest.mark.parametrize(
        "trigger",
        [ExponentialTrigger(2.0, 4.0), GaussianTrigger(2.0, 4.5), LinearTrigger(8.0, 12.0)],
    )
    def test_cumulative_matches_quadrature(self, trigger):
        for t in (0.2, 0.9):
            brute = integrate.quad(lambda u: trigger.value(u), 0.0, t, limit=200)[0]
            assert trigger.cumulative(t) == pytest.approx(brute, abs=1e-8)


# ---------------------------------------------------------------------------
# Poisson sampler
# ---------------------------------------------------------------------------

class TestPoissonSampler:
    def test_zero_intensity_is_empty(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            assert len(sample_poisson_inhom(0.0, 1.0, unit_square(), rng)) == 0

    def test_homogeneous_mean_count(self):
        rng = np.random.default_rng(1)
        counts = [len(sample_poisson_inhom(30.0, 30.0, unit_square(), rng)) for _ in range(10_000)]
        se = math.sqrt(30.0 / len(counts))
        assert abs(np.mean(counts) - 30.0) < 4.0 * se

    def test_radial_intensity_mean_count(self):
        density = lambda s: 30.0 * np.hypot(s[..., 0], s[..., 1])
        rng = np.random.default_rng(2)
        counts = [
            len(sample_poisson_inhom(density, 30.0 * math.sqrt(2.0), unit_square(), rng))
            for _ in range(10_000)
        ]
        se = math.sqrt(F0_MASS / len(counts))
        assert abs(np.mean(counts) - F0_MASS) < 4.0 * se

    def test_bound_violation_raises(self):
        rng = np.random.default_rng(3)
        with pytest.raises(RuntimeError):
            for _ in range(50):
                sample_poisson_inhom(30.0, 20.0, unit_square(), rng)

    def test_points_inside_window(self):
        rng = np.random.default_rng(4)
        p = sample_poisson_inhom(50.0, 50.0, unit_square(), rng)
        assert unit_square().contains(p.points).all()


# ---------------------------------------------------------------------------
# Thomas sampler
# ---------------------------------------------------------------------------

class TestThomasSampler:
    def test_no_parents_no_points(self):
        cfg = ThomasConfig(0.0, 1.0)
        rng = np.random.default_rng(5)
        for _ in range(10):
            assert len(sample_thomas(cfg, unit_square(), rng)) == 0

    def test_catalog_model_mean_count(self):
        # radial parents at half the target scale, two offspring each on
        # average: the expected count tracks the radial-intensity mass
        model = build_model("thomas")
        counts = []
        for r in range(100):
            for p in model.sample(SeedSpec(11, r), 100):
                counts.append(len(p))
        mean = float(np.mean(counts))
        assert abs(mean - F0_MASS) / F0_MASS < 0.03

    def test_tiny_sigma_duplicates_parents(self):
        cfg = ThomasConfig(20.0, 20.0, offspring_mean=3.0, sigma=1e-12)
        rng = np.random.default_rng(6)
        best = math.inf
        for _ in range(5):
            p = sample_thomas(cfg, unit_square(), rng)
            if len(p) >= 2:
                d = np.linalg.norm(p.points[:, None] - p.points[None, :], axis=-1)
                nonzero = d[np.triu_indices(len(p), 1)]
                if nonzero.size:
                    best = min(best, float(nonzero.min()))
        assert best < 1e-9

    def test_buffer_guard(self):
        with pytest.raises(ValueError):
            ThomasConfig(10.0, 10.0, sigma=0.1, buffer=0.1)


# ---------------------------------------------------------------------------
# LGCP sampler
# ---------------------------------------------------------------------------

class TestLgcpSampler:
    def test_degenerate_field_is_poisson(self):
        cfg = LgcpConfig(math.log(30.0), lambda a, b: np.zeros((a.shape[0], b.shape[0])),
                         grid_m=16, cache_token=("test-zero-cov", 16))
        counts = [len(p) for p in sample_lgcp_batch(cfg, unit_square(), np.random.default_rng(7), 4000)]
        se = math.sqrt(30.0 / len(counts))
        assert abs(np.mean(counts) - 30.0) < 4.0 * se
        # no trans-Poisson dispersion without field variance
        assert np.var(counts) < 1.3 * np.mean(counts)

    def test_catalog_model_mean_and_overdispersion(self):
        model = build_model("lgcp", grid=32)
        counts = []
        for r in range(50):
            for p in model.sample(SeedSpec(12, r), 100):
                counts.append(len(p))
        mean = float(np.mean(counts))
        assert abs(mean - F0_MASS) / F0_MASS < 0.03
        assert np.var(counts) > 1.5 * mean

    def test_factorization_cached_across_batches(self):
        cov = lambda a, b: 0.25 * np.exp(
            -np.linalg.norm(a[:, None, :] - b[None, :, :], axis=-1)
        )
        cfg = LgcpConfig(math.log(30.0), cov, grid_m=8, cache_token=("test-cache-probe", 8))
        before = lgcp_factorization_count()
        sample_lgcp_batch(cfg, unit_square(), np.random.default_rng(8), 3)
        after_first = lgcp_factorization_count()
        sample_lgcp_batch(cfg, unit_square(), np.random.default_rng(9), 3)
        sample_lgcp(cfg, unit_square(), np.random.default_rng(10))
        assert lgcp_factorization_count() == after_first
        assert after_first == before + 1

    def test_non_positive_definite_covariance_raises(self):
        cov = lambda a, b: -0.25 * np.exp(
            -np.linalg.norm(a[:, None, :] - b[None, :, :], axis=-1)
        )
        cfg = LgcpConfig(math.log(30.0), cov, grid_m=8, cache_token=("test-bad-cov", 8))
        with pytest.raises(RuntimeError):
            sample_lgcp(cfg, unit_square(), np.random.default_rng(11))

    def test_batch_deterministic_in_seed(self):
        model = build_model("lgcp", grid=32)
        a = model.sample(SeedSpec(99, 3), 2)
        b = model.sample(SeedSpec(99, 3), 2)
        assert all(np.array_equal(x.points, y.points) for x, y in zip(a, b))


# ---------------------------------------------------------------------------
# Hawkes sampler
# ---------------------------------------------------------------------------

class TestHawkesSampler:
    def test_no_trigger_reduces_to_poisson(self):
        cfg = HawkesConfig(2.0, ZeroTrigger(), 10.0)
        rng = np.random.default_rng(13)
        counts = [len(sample_hawkes(cfg, rng)) for _ in range(2000)]
        se = math.sqrt(20.0 / len(counts))
        assert abs(np.mean(counts) - 20.0) < 4.0 * se

    def test_exponential_trigger_mean_count(self):
        # branching ratio 1/2 doubles the background mean of 100
        cfg = HawkesConfig(2.0, ExponentialTrigger(2.0, 4.0), 50.0)
        rng = np.random.default_rng(14)
        counts = [len(sample_hawkes(cfg, rng)) for _ in range(500)]
        assert abs(np.mean(counts) - 200.0) / 200.0 < 0.03

    def test_gaussian_trigger_mean_count(self):
        # branching ratio sqrt(pi/4.5) ~ 0.8355: mean near 100/(1-0.8355)
        cfg = HawkesConfig(2.0, GaussianTrigger(2.0, 4.5), 50.0)
        rng = np.random.default_rng(15)
        counts = [len(sample_hawkes(cfg, rng)) for _ in range(200)]
        expected = 100.0 / (1.0 - math.sqrt(math.pi / 4.5))
        assert abs(np.mean(counts) - expected) / expected < 0.05

    def test_event_times_strictly_increasing(self):
        cfg = HawkesConfig(2.0, ExponentialTrigger(2.0, 4.0), 20.0)
        rng = np.random.default_rng(16)
        for _ in range(20):
            p = sample_hawkes(cfg, rng)
            assert isinstance(p, TemporalPattern)
            if len(p) > 1:
                assert (np.diff(p.times) > 0).all()

    def test_supercritical_rejected(self):
        with pytest.raises(ValueError):
            HawkesConfig(2.0, ExponentialTrigger(4.0, 2.0), 50.0)

    def test_increasing_trigger_rejected(self):
        with pytest.raises(ValueError):
            HawkesConfig(2.0, GenericTrigger(lambda t: t, 1.0), 50.0)


# ---------------------------------------------------------------------------
# catalog wiring
# ---------------------------------------------------------------------------

class TestCatalogModels:
    def test_unknown_override_rejected(self):
        with pytest.raises(ValueError):
            build_model("poisson", bogus=1.0)

    def test_unknown_model_rejected(self):
        with pytest.raises(ValueError):
            build_model("no-such-model")

    @pytest.mark.parametrize("name,kind", [
        ("poisson", "spatial"), ("lgcp", "spatial"), ("thomas", "spatial"),
        ("poisson-homog", "spatial"), ("lgcp-stationary", "spatial"),
        ("hawkes-f1", "temporal"), ("hawkes-f3", "temporal"),
    ])
    def test_catalog_kinds(self, name, kind):
        overrides = {"grid": 16} if "lgcp" in name else {}
        model = build_model(name, **overrides)
        assert model.kind == kind
        batch = model.sample(SeedSpec(1, 0), 2)
        assert len(batch) == 2
