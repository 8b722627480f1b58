"""Samplers for the data-generating processes of the simulation study.

Every sampler is a pure function of a `SeedSpec` (or an explicit numpy
Generator), so repetitions can run on any number of workers with bitwise
reproducible results: the per-repetition stream is a counter-based mix of
(master_seed, rep_index) and never depends on scheduling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np
from scipy.special import erf

from .patterns import SpatialPattern, TemporalPattern, Window

__all__ = [
    "SeedSpec",
    "ExponentialTrigger",
    "GaussianTrigger",
    "LinearTrigger",
    "IndicatorTrigger",
    "ZeroTrigger",
    "GenericTrigger",
    "adaptive_simpson",
    "LgcpConfig",
    "ThomasConfig",
    "HawkesConfig",
    "sample_poisson_inhom",
    "sample_thomas",
    "sample_lgcp",
    "sample_lgcp_batch",
    "sample_hawkes",
    "lgcp_factorization_count",
]


@dataclass(frozen=True)
class SeedSpec:
    """Master seed plus repetition index; one independent stream per repetition."""

    master_seed: int
    rep_index: int = 0

    def __post_init__(self):
        if not 0 <= int(self.master_seed) < 2 ** 64:
            raise ValueError("master_seed must be an unsigned 64-bit integer")
        if int(self.rep_index) < 0:
            raise ValueError("rep_index must be nonnegative")

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(self.master_seed, spawn_key=(self.rep_index,))
        return np.random.default_rng(seq)


RngLike = Union[SeedSpec, np.random.Generator]


def _rng(seed: RngLike) -> np.random.Generator:
    if isinstance(seed, SeedSpec):
        return seed.generator()
    if isinstance(seed, np.random.Generator):
        return seed
    raise TypeError(f"expected SeedSpec or numpy Generator, got {type(seed)!r}")


def _as_density(fn: Union[float, Callable]) -> Callable:
    if callable(fn):
        return fn
    const = float(fn)
    return lambda pts: np.full(np.asarray(pts).shape[0], const)


# ---------------------------------------------------------------------------
# triggering functions (self-exciting kernels g with cumulative G(x) = ∫₀ˣ g)
# ---------------------------------------------------------------------------

def adaptive_simpson(fn: Callable[[float], float], a: float, b: float,
                     tol: float = 1e-8, max_depth: int = 50) -> float:
    """Adaptive Simpson quadrature of a scalar function on [a, b]."""
    if b <= a:
        return 0.0

    def simpson(lo, hi, f_lo, f_mid, f_hi):
        return (hi - lo) / 6.0 * (f_lo + 4.0 * f_mid + f_hi)

    def recurse(lo, hi, f_lo, f_mid, f_hi, whole, eps, depth):
        mid = 0.5 * (lo + hi)
        lm, rm = 0.5 * (lo + mid), 0.5 * (mid + hi)
        f_lm, f_rm = fn(lm), fn(rm)
        left = simpson(lo, mid, f_lo, f_lm, f_mid)
        right = simpson(mid, hi, f_mid, f_rm, f_hi)
        if depth <= 0 or abs(left + right - whole) <= 15.0 * eps:
            return left + right + (left + right - whole) / 15.0
        return (recurse(lo, mid, f_lo, f_lm, f_mid, left, eps / 2.0, depth - 1)
                + recurse(mid, hi, f_mid, f_rm, f_hi, right, eps / 2.0, depth - 1))

    mid = 0.5 * (a + b)
    f_a, f_m, f_b = fn(a), fn(mid), fn(b)
    whole = simpson(a, b, f_a, f_m, f_b)
    return recurse(a, b, f_a, f_m, f_b, whole, tol, max_depth)


@dataclass(frozen=True)
class ExponentialTrigger:
    """g(t) = amplitude * exp(-decay * t)."""

    amplitude: float
    decay: float

    def __post_init__(self):
        if self.amplitude < 0 or self.decay <= 0:
            raise ValueError("exponential trigger needs amplitude >= 0, decay > 0")

    @property
    def mass(self) -> float:
        return self.amplitude / self.decay

    def value(self, t):
        t = np.asarray(t, dtype=float)
        return np.where(t >= 0.0, self.amplitude * np.exp(-self.decay * np.maximum(t, 0.0)), 0.0)

    def cumulative(self, x):
        x = np.asarray(x, dtype=float)
        xc = np.maximum(x, 0.0)
        return self.amplitude / self.decay * (1.0 - np.exp(-self.decay * xc))


@dataclass(frozen=True)
class GaussianTrigger:
    """g(t) = amplitude * exp(-rate * t^2); cumulative in closed form via erf."""

    amplitude: float
    rate: float

    def __post_init__(self):
        if self.amplitude < 0 or self.rate <= 0:
            raise ValueError("gaussian trigger needs amplitude >= 0, rate > 0")

    @property
    def mass(self) -> float:
        return self.amplitude * 0.5 * math.sqrt(math.pi / self.rate)

    def value(self, t):
        t = np.asarray(t, dtype=float)
        return np.where(t >= 0.0, self.amplitude * np.exp(-self.rate * t * t), 0.0)

    def cumulative(self, x):
        x = np.asarray(x, dtype=float)
        xc = np.maximum(x, 0.0)
        return self.amplitude * 0.5 * np.sqrt(np.pi / self.rate) * erf(np.sqrt(self.rate) * xc)


@dataclass(frozen=True)
class LinearTrigger:
    """g(t) = max(peak - slope * t, 0); support [0, peak/slope]."""

    peak: float
    slope: float

    def __post_init__(self):
        if self.peak < 0 or self.slope <= 0:
            raise ValueError("linear trigger needs peak >= 0, slope > 0")

    @property
    def support(self) -> float:
        return self.peak / self.slope

    @property
    def mass(self) -> float:
        return 0.5 * self.peak ** 2 / self.slope

    def value(self, t):
        t = np.asarray(t, dtype=float)
        return np.where(t >= 0.0, np.maximum(self.peak - self.slope * t, 0.0), 0.0)

    def cumulative(self, x):
        x = np.asarray(x, dtype=float)
        xc = np.clip(x, 0.0, self.support)
        return self.peak * xc - 0.5 * self.slope * xc * xc


@dataclass(frozen=True)
class IndicatorTrigger:
    """g(t) = height * 1{0 <= t <= width}."""

    height: float
    width: float

    def __post_init__(self):
        if self.height < 0 or self.width <= 0:
            raise ValueError("indicator trigger needs height >= 0, width > 0")

    @property
    def mass(self) -> float:
        return self.height * self.width

    def value(self, t):
        t = np.asarray(t, dtype=float)
        return np.where((t >= 0.0) & (t <= self.width), self.height, 0.0)

    def cumulative(self, x):
        x = np.asarray(x, dtype=float)
        return self.height * np.clip(x, 0.0, self.width)


@dataclass(frozen=True)
class ZeroTrigger:
    """No triggering: the process degenerates to homogeneous Poisson."""

    @property
    def mass(self) -> float:
        return 0.0

    def value(self, t):
        return np.zeros_like(np.asarray(t, dtype=float))

    def cumulative(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))


@dataclass(frozen=True)
class GenericTrigger:
    """Arbitrary kernel; cumulative by adaptive Simpson (no closed form)."""

    fn: Callable[[float], float]
    support: float  # g treated as zero beyond this lag
    tol: float = 1e-8

    @property
    def mass(self) -> float:
        return adaptive_simpson(self.fn, 0.0, self.support, self.tol)

    def value(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        mask = (t >= 0.0) & (t <= self.support)
        if np.any(mask):
            out[mask] = np.vectorize(self.fn, otypes=[float])(t[mask])
        return out

    def cumulative(self, x):
        x = np.asarray(x, dtype=float)
        flat = np.clip(x.ravel(), 0.0, self.support)
        vals = np.array([adaptive_simpson(self.fn, 0.0, xi, self.tol) for xi in flat])
        return vals.reshape(x.shape)


# ---------------------------------------------------------------------------
# inhomogeneous Poisson by thinning
# ---------------------------------------------------------------------------

def _poisson_thinning(intensity: Callable, intensity_max: float, window: Window,
                      rng: np.random.Generator) -> np.ndarray:
    if intensity_max < 0:
        raise ValueError("intensity_max must be nonnegative")
    if intensity_max == 0.0:
        return np.empty((0, window.dim))
    n = rng.poisson(intensity_max * window.volume)
    pts = np.asarray(window.lower) + rng.random((n, window.dim)) * window.sides
    if n == 0:
        return pts
    vals = np.asarray(intensity(pts), dtype=float)
    over = vals > intensity_max * (1.0 + 1e-12)
    if np.any(over):
        where = pts[over][0]
        raise RuntimeError(
            f"intensity {vals[over][0]:.6g} exceeds stated bound {intensity_max:.6g} "
            f"at location {tuple(where)}"
        )
    keep = rng.random(n) * intensity_max < vals
    return pts[keep]


def sample_poisson_inhom(intensity: Union[float, Callable], intensity_max: float,
                         window: Window, seed: RngLike) -> SpatialPattern:
    """Inhomogeneous Poisson process on the window via thinning."""
    rng = _rng(seed)
    pts = _poisson_thinning(_as_density(intensity), float(intensity_max), window, rng)
    return SpatialPattern(pts, window)


# ---------------------------------------------------------------------------
# Thomas cluster process
# ---------------------------------------------------------------------------

@dataclass
class ThomasConfig:
    """Parent Poisson process + Poisson(offspring_mean) Gaussian offspring."""

    parent_intensity: Union[float, Callable]
    parent_intensity_max: float
    offspring_mean: float = 2.0
    sigma: float = 0.05
    buffer: Optional[float] = None  # defaults to 4 sigma

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if self.offspring_mean < 0:
            raise ValueError("offspring_mean must be nonnegative")
        if self.buffer is None:
            self.buffer = 4.0 * self.sigma
        if self.buffer < 4.0 * self.sigma:
            raise ValueError("buffer must be at least 4 sigma")


def sample_thomas(config: ThomasConfig, window: Window, seed: RngLike) -> SpatialPattern:
    """Offspring-only draw; parents live on the buffer-expanded window."""
    rng = _rng(seed)
    lo = np.asarray(window.lower) - config.buffer
    hi = np.asarray(window.upper) + config.buffer
    expanded = Window(tuple(lo), tuple(hi))
    parents = _poisson_thinning(
        _as_density(config.parent_intensity), float(config.parent_intensity_max),
        expanded, rng,
    )
    if parents.shape[0] == 0:
        return SpatialPattern(np.empty((0, window.dim)), window)
    litter = rng.poisson(config.offspring_mean, size=parents.shape[0])
    total = int(litter.sum())
    if total == 0:
        return SpatialPattern(np.empty((0, window.dim)), window)
    centers = np.repeat(parents, litter, axis=0)
    offspring = centers + rng.normal(0.0, config.sigma, size=(total, window.dim))
    keep = window.contains(offspring)
    return SpatialPattern(offspring[keep], window)


# ---------------------------------------------------------------------------
# log-Gaussian Cox process on a grid
# ---------------------------------------------------------------------------

@dataclass
class LgcpConfig:
    """Gaussian random field at cell centers; intensity cell-constant.

    mean_fn maps (k, d) center coordinates to the field mean; cov_fn maps two
    center arrays to their covariance matrix.  cache_token, when set, lets
    separately constructed but identical configs share one factorization.
    """

    mean_fn: Union[float, Callable]
    cov_fn: Callable[[np.ndarray, np.ndarray], np.ndarray]
    grid_m: int = 64
    cache_token: Optional[tuple] = None

    def __post_init__(self):
        if int(self.grid_m) < 1:
            raise ValueError("grid_m must be >= 1")
        self.grid_m = int(self.grid_m)


_LGCP_CACHE: dict = {}
_LGCP_FACTORIZATIONS = 0


def lgcp_factorization_count() -> int:
    """How many Cholesky factorizations have run (cache instrumentation)."""
    return _LGCP_FACTORIZATIONS


def _build_lgcp_state(config: LgcpConfig, window: Window) -> dict:
    global _LGCP_FACTORIZATIONS
    m = config.grid_m
    d = window.dim
    lo = np.asarray(window.lower)
    widths = window.sides / m
    axes = [lo[k] + (np.arange(m) + 0.5) * widths[k] for k in range(d)]
    mesh = np.meshgrid(*axes, indexing="ij")
    centers = np.stack([ax.ravel() for ax in mesh], axis=1)

    if callable(config.mean_fn):
        mu = np.asarray(config.mean_fn(centers), dtype=float).reshape(centers.shape[0])
    else:
        mu = np.full(centers.shape[0], float(config.mean_fn))

    cov = np.asarray(config.cov_fn(centers, centers), dtype=float)
    if cov.shape != (centers.shape[0], centers.shape[0]):
        raise ValueError(f"covariance matrix has shape {cov.shape}")

    jitter = 0.0
    try:
        chol = np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        jitter = 1e-10 * max(np.trace(cov) / cov.shape[0], 1.0)
        try:
            chol = np.linalg.cholesky(cov + jitter * np.eye(cov.shape[0]))
        except np.linalg.LinAlgError as exc:
            raise RuntimeError(
                f"LGCP covariance factorization failed even with jitter {jitter:.3e}"
            ) from exc
    _LGCP_FACTORIZATIONS += 1

    cell_lower = centers - 0.5 * widths
    return {
        "window": window,
        "mu": mu,
        "chol": chol,
        "cell_lower": cell_lower,
        "cell_widths": widths,
        "cell_volume": float(np.prod(widths)),
        "jitter": jitter,
    }


def _lgcp_state(config: LgcpConfig, window: Window) -> dict:
    state = config.__dict__.get("_grid_state")
    if state is not None and state["window"] == window:
        return state
    if config.cache_token is not None:
        key = (config.cache_token, window)
        state = _LGCP_CACHE.get(key)
        if state is None:
            state = _build_lgcp_state(config, window)
            _LGCP_CACHE[key] = state
    else:
        state = _build_lgcp_state(config, window)
    config.__dict__["_grid_state"] = state
    return state


def sample_lgcp_batch(config: LgcpConfig, window: Window, seed: RngLike,
                      count: int) -> list:
    """Draw `count` independent patterns from one stream (field draws batched).

    Stream order: all field normals first (cells x count), then per pattern the
    Poisson cell counts followed by the in-cell uniforms.
    """
    rng = _rng(seed)
    state = _lgcp_state(config, window)
    k = state["mu"].size
    normals = rng.standard_normal((k, int(count)))
    fields = state["mu"][:, None] + state["chol"] @ normals
    cell_mass = np.exp(fields) * state["cell_volume"]

    out = []
    d = window.dim
    for j in range(int(count)):
        counts = rng.poisson(cell_mass[:, j])
        total = int(counts.sum())
        occupied = np.repeat(np.arange(k), counts)
        offsets = rng.random((total, d))
        pts = state["cell_lower"][occupied] + offsets * state["cell_widths"]
        out.append(SpatialPattern(pts, window))
    return out


def sample_lgcp(config: LgcpConfig, window: Window, seed: RngLike) -> SpatialPattern:
    """Single draw from the grid-discretized log-Gaussian Cox process."""
    return sample_lgcp_batch(config, window, seed, 1)[0]


# ---------------------------------------------------------------------------
# Hawkes process by Ogata thinning
# ---------------------------------------------------------------------------

@dataclass
class HawkesConfig:
    """Background rate + triggering kernel on (0, horizon]."""

    background: float
    trigger: object
    horizon: float

    def __post_init__(self):
        if self.background < 0:
            raise ValueError("background rate must be nonnegative")
        if self.horizon <= 0:
            raise ValueError("horizon must be positive")
        mass = float(self.trigger.mass)
        if mass >= 1.0:
            raise ValueError(
                f"triggering mass {mass:.4g} >= 1: supercritical, no stationary rate"
            )
        probe = np.linspace(0.0, self.horizon, 513)
        vals = np.asarray(self.trigger.value(probe), dtype=float)
        if np.any(np.diff(vals) > 1e-12):
            raise ValueError("triggering function must be non-increasing on [0, horizon]")


def sample_hawkes(config: HawkesConfig, seed: RngLike) -> TemporalPattern:
    """Ogata thinning with the local bound λ*(s⁺), valid for non-increasing g."""
    rng = _rng(seed)
    nu = float(config.background)
    trig = config.trigger
    horizon = float(config.horizon)

    events: list = []
    past = np.empty(0)
    t = 0.0
    while True:
        bound = nu + float(trig.value(t - past).sum()) if past.size else nu
        if bound <= 0.0:
            break
        t += rng.exponential(1.0 / bound)
        if t > horizon:
            break
        rate = nu + float(trig.value(t - past).sum()) if past.size else nu
        if rng.random() * bound < rate:
            events.append(t)
            past = np.asarray(events)
    return TemporalPattern(np.asarray(events), horizon)
