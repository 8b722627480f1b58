"""Built-in forecast catalogs and data-generating models for the experiments.

Three forecast families are bundled: spatial intensity surfaces on the unit
square, stationary second-order product densities, and temporal
conditional-intensity reports.  Each entry carries a human-readable formula
string (shown by the CLI catalog listing) and a factory accepting numeric
overrides.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, Mapping

import numpy as np

from .patterns import unit_square
from .pp_scores import CondIntensityForecast, IntensityForecast, ProductDensityForecast
from .simulate import (
    ExponentialTrigger,
    GaussianTrigger,
    HawkesConfig,
    IndicatorTrigger,
    LgcpConfig,
    LinearTrigger,
    RngLike,
    ThomasConfig,
    ZeroTrigger,
    _rng,
    sample_hawkes,
    sample_lgcp_batch,
    sample_poisson_inhom,
    sample_thomas,
)

__all__ = [
    "UNIT_SQUARE",
    "ForecastSpec",
    "ModelSpec",
    "DataModel",
    "spatial_intensity_catalog",
    "product_density_catalog",
    "temporal_catalog",
    "forecast_catalog",
    "data_model_catalog",
    "build_forecast",
    "build_model",
]

UNIT_SQUARE = unit_square()


@dataclass(frozen=True)
class ForecastSpec:
    """Catalog entry: display formula, default parameters, factory."""

    name: str
    formula: str
    defaults: Mapping[str, float]
    factory: Callable

    def build(self, **overrides):
        params = dict(self.defaults)
        unknown = set(overrides) - set(params)
        if unknown:
            raise ValueError(
                f"unknown parameter(s) {sorted(unknown)} for forecast {self.name}; "
                f"known: {sorted(params)}"
            )
        params.update(overrides)
        return self.factory(self.name, **params)


@dataclass(frozen=True)
class DataModel:
    """A simulable ground truth: draws `count` patterns from one RNG stream."""

    name: str
    kind: str  # "spatial" | "temporal"
    sampler: Callable  # (rng, count) -> list of patterns

    def sample(self, seed: RngLike, count: int) -> list:
        return self.sampler(_rng(seed), count)


@dataclass(frozen=True)
class ModelSpec:
    name: str
    description: str
    defaults: Mapping[str, float]
    factory: Callable

    def build(self, **overrides) -> DataModel:
        params = dict(self.defaults)
        unknown = set(overrides) - set(params)
        if unknown:
            raise ValueError(
                f"unknown parameter(s) {sorted(unknown)} for model {self.name}; "
                f"known: {sorted(params)}"
            )
        params.update(overrides)
        return self.factory(self.name, **params)


# ---------------------------------------------------------------------------
# spatial intensity forecasts (unit square)
# ---------------------------------------------------------------------------

def _intensity(name: str, density: Callable) -> IntensityForecast:
    return IntensityForecast(density, UNIT_SQUARE, name=name)


def _f_radial(name, scale, cx, cy):
    def density(p):
        return scale * np.sqrt((p[:, 0] - cx) ** 2 + (p[:, 1] - cy) ** 2)
    return _intensity(name, density)


def _f_linear(name, scale):
    def density(p):
        return scale * (p[:, 0] + 3.0 * p[:, 1])
    return _intensity(name, density)


def _f_edge(name, scale):
    def density(p):
        return scale * (1.0 / np.sqrt(1.2 - p[:, 0]) + 2.0 * (1.0 - p[:, 1]))
    return _intensity(name, density)


def _f_bump(name, scale):
    def density(p):
        return scale * np.exp(-2.0 * (p[:, 0] ** 2 + (p[:, 1] - 0.5) ** 2))
    return _intensity(name, density)


def spatial_intensity_catalog() -> Dict[str, ForecastSpec]:
    return {
        "f0": ForecastSpec(
            "f0", "30*sqrt(x^2+y^2)", {"scale": 30.0},
            lambda name, scale: _f_radial(name, scale, 0.0, 0.0),
        ),
        "f1": ForecastSpec(
            "f1", "40*sqrt((x-0.2)^2+(y-0.1)^2)",
            {"scale": 40.0, "cx": 0.2, "cy": 0.1},
            lambda name, scale, cx, cy: _f_radial(name, scale, cx, cy),
        ),
        "f2": ForecastSpec(
            "f2", "11.78*(x+3*y)", {"scale": 11.78},
            lambda name, scale: _f_linear(name, scale),
        ),
        "f3": ForecastSpec(
            "f3", "45*sqrt((x-0.2)^2+(y-0.1)^2)",
            {"scale": 45.0, "cx": 0.2, "cy": 0.1},
            lambda name, scale, cx, cy: _f_radial(name, scale, cx, cy),
        ),
        "f4": ForecastSpec(
            "f4", "9.5*(1/sqrt(1.2-x)+2*(1-y))", {"scale": 9.5},
            lambda name, scale: _f_edge(name, scale),
        ),
        "f5": ForecastSpec(
            "f5", "46*exp(-2*(x^2+(y-0.5)^2))", {"scale": 46.0},
            lambda name, scale: _f_bump(name, scale),
        ),
    }


# ---------------------------------------------------------------------------
# second-order product-density forecasts (unit square, radial)
# ---------------------------------------------------------------------------

_LAM2 = 40.0
_SIG2 = math.log(2.0)
_MU2 = math.log(_LAM2) - _SIG2 / 2.0


def _product(name, radial) -> ProductDensityForecast:
    return ProductDensityForecast(radial, UNIT_SQUARE, name=name)


def product_density_catalog() -> Dict[str, ForecastSpec]:
    def g1(name, lam, sig2):
        mu = math.log(lam) - sig2 / 2.0
        return _product(
            name, lambda r: np.exp(2.0 * mu + sig2 * (1.0 + np.exp(-400.0 * r ** 2)))
        )

    def g2(name, lam, sig2):
        mu = math.log(lam) - sig2 / 2.0
        return _product(
            name, lambda r: np.exp(2.0 * mu + sig2 * (1.0 + np.exp(-20.0 * r)))
        )

    def g3(name, lam):
        return _product(name, lambda r: np.full_like(np.asarray(r, dtype=float), lam ** 2))

    def g4(name, lam, gamma):
        return _product(name, lambda r: lam ** 2 * (1.0 - np.exp(-2.0 * r / gamma)))

    def g5(name, lam, gamma):
        return _product(name, lambda r: lam ** 2 * (1.0 - np.exp(-2.0 * (r / gamma) ** 2)))

    return {
        "f1": ForecastSpec(
            "f1", "exp(2*mu+sig2*(1+exp(-400*r^2))), mu=log(40)-sig2/2",
            {"lam": _LAM2, "sig2": _SIG2}, g1,
        ),
        "f2": ForecastSpec(
            "f2", "exp(2*mu+sig2*(1+exp(-20*r))), mu=log(40)-sig2/2",
            {"lam": _LAM2, "sig2": _SIG2}, g2,
        ),
        "f3": ForecastSpec("f3", "40^2", {"lam": _LAM2}, g3),
        "f4": ForecastSpec(
            "f4", "40^2*(1-exp(-2*r/0.06))", {"lam": _LAM2, "gamma": 0.06}, g4,
        ),
        "f5": ForecastSpec(
            "f5", "40^2*(1-exp(-2*(r/0.06)^2))", {"lam": _LAM2, "gamma": 0.06}, g5,
        ),
    }


# ---------------------------------------------------------------------------
# temporal conditional-intensity forecasts
# ---------------------------------------------------------------------------

def temporal_catalog() -> Dict[str, ForecastSpec]:
    return {
        "f1": ForecastSpec(
            "f1", "nu=2, g(t)=2*exp(-4*t)", {"nu": 2.0, "amplitude": 2.0, "decay": 4.0},
            lambda name, nu, amplitude, decay: CondIntensityForecast(
                nu, ExponentialTrigger(amplitude, decay), name=name
            ),
        ),
        "f2": ForecastSpec(
            "f2", "nu=2, g(t)=1.25*exp(-2*t)",
            {"nu": 2.0, "amplitude": 1.25, "decay": 2.0},
            lambda name, nu, amplitude, decay: CondIntensityForecast(
                nu, ExponentialTrigger(amplitude, decay), name=name
            ),
        ),
        "f3": ForecastSpec(
            "f3", "nu=2, g(t)=2*exp(-4.5*t^2)", {"nu": 2.0, "amplitude": 2.0, "rate": 4.5},
            lambda name, nu, amplitude, rate: CondIntensityForecast(
                nu, GaussianTrigger(amplitude, rate), name=name
            ),
        ),
        "f4": ForecastSpec(
            "f4", "nu=2, g(t)=max(8-12*t, 0)", {"nu": 2.0, "peak": 8.0, "slope": 12.0},
            lambda name, nu, peak, slope: CondIntensityForecast(
                nu, LinearTrigger(peak, slope), name=name
            ),
        ),
        "f5": ForecastSpec(
            "f5", "nu=2, g(t)=1 on [0, 0.8]", {"nu": 2.0, "height": 1.0, "width": 0.8},
            lambda name, nu, height, width: CondIntensityForecast(
                nu, IndicatorTrigger(height, width), name=name
            ),
        ),
        "poisson": ForecastSpec(
            "poisson", "constant rate nu, no triggering", {"nu": 2.0},
            lambda name, nu: CondIntensityForecast(nu, ZeroTrigger(), name=name),
        ),
    }


def forecast_catalog(kind: str) -> Dict[str, ForecastSpec]:
    catalogs = {
        "intensity": spatial_intensity_catalog,
        "product": product_density_catalog,
        "temporal": temporal_catalog,
    }
    if kind not in catalogs:
        raise ValueError(f"unknown forecast kind {kind!r}; known: {sorted(catalogs)}")
    return catalogs[kind]()


def build_forecast(kind: str, name: str, **overrides):
    cat = forecast_catalog(kind)
    if name not in cat:
        raise ValueError(f"unknown forecast {name!r} for kind {kind!r}; known: {sorted(cat)}")
    return cat[name].build(**overrides)


# ---------------------------------------------------------------------------
# data-generating models
# ---------------------------------------------------------------------------

def _radial_density(scale):
    return lambda p: scale * np.sqrt(p[:, 0] ** 2 + p[:, 1] ** 2)


def _poisson_model(name, scale):
    density = _radial_density(scale)
    bound = scale * math.sqrt(2.0)

    def sampler(rng, count):
        return [sample_poisson_inhom(density, bound, UNIT_SQUARE, rng) for _ in range(count)]

    return DataModel(name, "spatial", sampler)


def _lgcp_model(name, scale, grid):
    sig2 = 0.25

    def mean_fn(p):
        return np.log(scale * np.sqrt(p[:, 0] ** 2 + p[:, 1] ** 2)) - sig2 / 2.0

    def cov_fn(a, b):
        d = np.sqrt(((a[:, None, :] - b[None, :, :]) ** 2).sum(-1))
        return sig2 * np.exp(-d)

    config = LgcpConfig(mean_fn, cov_fn, grid_m=grid,
                        cache_token=f"{name}-expcov-{scale}-{grid}")

    def sampler(rng, count):
        return sample_lgcp_batch(config, UNIT_SQUARE, rng, count)

    return DataModel(name, "spatial", sampler)


def _thomas_model(name, parent_scale, offspring_mean, sigma, buffer):
    density = _radial_density(parent_scale)
    expanded_corner = 1.0 + buffer
    bound = parent_scale * expanded_corner * math.sqrt(2.0)
    config = ThomasConfig(
        parent_intensity=density,
        parent_intensity_max=bound,
        offspring_mean=offspring_mean,
        sigma=sigma,
        buffer=buffer,
    )

    def sampler(rng, count):
        return [sample_thomas(config, UNIT_SQUARE, rng) for _ in range(count)]

    return DataModel(name, "spatial", sampler)


def _homog_poisson_model(name, rate):
    def sampler(rng, count):
        density = lambda p: np.full(p.shape[0], rate)
        return [sample_poisson_inhom(density, rate, UNIT_SQUARE, rng) for _ in range(count)]

    return DataModel(name, "spatial", sampler)


def _stationary_lgcp_model(name, rate, sig2, scale, grid):
    mu = math.log(rate) - sig2 / 2.0

    def cov_fn(a, b):
        d2 = ((a[:, None, :] - b[None, :, :]) ** 2).sum(-1)
        return sig2 * np.exp(-d2 / scale ** 2)

    config = LgcpConfig(mu, cov_fn, grid_m=grid,
                        cache_token=f"{name}-{rate}-{sig2:.6f}-{scale}-{grid}")

    def sampler(rng, count):
        return sample_lgcp_batch(config, UNIT_SQUARE, rng, count)

    return DataModel(name, "spatial", sampler)


def _hawkes_model(name, trigger_factory, nu, horizon, **kw):
    config = HawkesConfig(nu, trigger_factory(**kw), horizon)

    def sampler(rng, count):
        return [sample_hawkes(config, rng) for _ in range(count)]

    return DataModel(name, "temporal", sampler)


def data_model_catalog() -> Dict[str, ModelSpec]:
    return {
        "poisson": ModelSpec(
            "poisson", "inhomogeneous Poisson, intensity 30*sqrt(x^2+y^2)",
            {"scale": 30.0},
            lambda name, scale: _poisson_model(name, scale),
        ),
        "lgcp": ModelSpec(
            "lgcp",
            "log-Gaussian Cox, mean log(30*sqrt(x^2+y^2))-1/8, cov 0.25*exp(-d)",
            {"scale": 30.0, "grid": 64},
            lambda name, scale, grid: _lgcp_model(name, scale, int(grid)),
        ),
        "thomas": ModelSpec(
            "thomas",
            "Thomas cluster: parents 15*sqrt(x^2+y^2), mean 2 offspring, sd 0.05",
            {"parent_scale": 15.0, "offspring_mean": 2.0, "sigma": 0.05, "buffer": 0.2},
            lambda name, parent_scale, offspring_mean, sigma, buffer: _thomas_model(
                name, parent_scale, offspring_mean, sigma, buffer
            ),
        ),
        "poisson-homog": ModelSpec(
            "poisson-homog", "homogeneous Poisson, rate 40", {"rate": 40.0},
            lambda name, rate: _homog_poisson_model(name, rate),
        ),
        "lgcp-stationary": ModelSpec(
            "lgcp-stationary",
            "stationary log-Gaussian Cox, rate 40, cov log(2)*exp(-(d/0.05)^2)",
            {"rate": 40.0, "sig2": _SIG2, "scale": 0.05, "grid": 64},
            lambda name, rate, sig2, scale, grid: _stationary_lgcp_model(
                name, rate, sig2, scale, int(grid)
            ),
        ),
        "hawkes-f1": ModelSpec(
            "hawkes-f1", "self-exciting: nu=2, g(t)=2*exp(-4*t)",
            {"nu": 2.0, "amplitude": 2.0, "decay": 4.0, "horizon": 50.0},
            lambda name, nu, amplitude, decay, horizon: _hawkes_model(
                name, ExponentialTrigger, nu, horizon, amplitude=amplitude, decay=decay
            ),
        ),
        "hawkes-f3": ModelSpec(
            "hawkes-f3", "self-exciting: nu=2, g(t)=2*exp(-4.5*t^2)",
            {"nu": 2.0, "amplitude": 2.0, "rate": 4.5, "horizon": 50.0},
            lambda name, nu, amplitude, rate, horizon: _hawkes_model(
                name, GaussianTrigger, nu, horizon, amplitude=amplitude, rate=rate
            ),
        ),
    }


def build_model(name: str, **overrides) -> DataModel:
    cat = data_model_catalog()
    if name not in cat:
        raise ValueError(f"unknown model {name!r}; known: {sorted(cat)}")
    return cat[name].build(**overrides)
