"""Scalar scoring building blocks: Bregman scores, log scores, CRPS.

All scores are negatively oriented (smaller is better).  Scores that can
explode (log of a zero density, binary log score with a categorical miss)
return +inf as a flagged sentinel instead of raising, so Monte Carlo summaries
can count their frequency; callers record finiteness alongside values.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

__all__ = [
    "BregmanGenerator",
    "bregman_score",
    "QUADRATIC",
    "POISSON_COUNT",
    "log_score",
    "binary_log_score",
    "crps",
]


@dataclass(frozen=True)
class BregmanGenerator:
    """Convex generator for the consistent expectation score
    b(x, y) = -f(x) - f'(x) (y - x) [+ h(y)].

    The optional report-independent offset h(y) selects a representative from
    the equivalence class of scores that share the same minimizer; it never
    affects consistency, minimizers, or score differences between reports.
    """

    f: Callable[[float], float]
    deriv: Callable[[float], float]
    offset: Optional[Callable[[float], float]] = None
    name: str = ""
    domain: Optional[tuple] = None

    def __post_init__(self):
        if self.domain is not None:
            # convexity spot check: f(midpoint) <= chord on a coarse grid
            lo, hi = self.domain
            grid = np.linspace(lo, hi, 17)
            for a, b in zip(grid[:-1], grid[1:]):
                mid = 0.5 * (a + b)
                chord = 0.5 * (self.f(a) + self.f(b))
                if self.f(mid) > chord + 1e-9 * (1.0 + abs(chord)):
                    raise ValueError(
                        f"generator {self.name or self.f!r} fails convexity "
                        f"spot check on [{a}, {b}]"
                    )

    def score(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        val = -self.f(x) - self.deriv(x) * (y - x)
        if self.offset is not None:
            val = val + self.offset(y)
        if val.ndim == 0:
            return float(val)
        return val


def bregman_score(gen: BregmanGenerator, x, y):
    """Score the report x against observation y under the generator's b."""
    return gen.score(x, y)


#: Canonical mean score (x - y)^2: f(x) = x^2 with offset y^2.
QUADRATIC = BregmanGenerator(
    f=lambda x: x * x,
    deriv=lambda x: 2.0 * x,
    offset=lambda y: y * y,
    name="quadratic",
    domain=(-10.0, 10.0),
)

#: Count score x - y log x from f(x) = x (log x - 1); strictly consistent for
#: expectations of nonnegative counts.
POISSON_COUNT = BregmanGenerator(
    f=lambda x: x * (np.log(x) - 1.0),
    deriv=np.log,
    name="poisson-count",
    domain=(1e-6, 50.0),
)


def log_score(p) -> float:
    """-log p for a density value p; +inf sentinel for p <= 0."""
    p = float(p)
    if p <= 0.0:
        return math.inf
    return -math.log(p)


def binary_log_score(p, y) -> float:
    """-y log p - (1-y) log(1-p) for an occupancy probability p and y in {0,1}.

    p in {0, 1} is allowed only when it matches y; a categorical miss returns
    the +inf sentinel.  p outside [0, 1] is a contract violation.
    """
    p = float(p)
    if float(y) not in (0.0, 1.0):
        raise ValueError(f"indicator observation must be 0 or 1, got {y}")
    y = int(y)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability report must lie in [0, 1], got {p}")
    if p == 0.0:
        return 0.0 if y == 0 else math.inf
    if p == 1.0:
        return 0.0 if y == 1 else math.inf
    return -y * math.log(p) - (1 - y) * math.log(1.0 - p)


def _composite_simpson(fn, a: float, b: float, panels: int) -> float:
    if b <= a:
        return 0.0
    x = np.linspace(a, b, 2 * panels + 1)
    vals = np.asarray(fn(x), dtype=float)
    h = (b - a) / (2 * panels)
    return float(h / 3.0 * (vals[0] + vals[-1] + 4.0 * vals[1:-1:2].sum() + 2.0 * vals[2:-1:2].sum()))


def crps(cdf: Callable[[np.ndarray], np.ndarray], y: float, lo: float, hi: float,
         panels: int = 400) -> float:
    """Continuous ranked probability score  ∫ (F(x) - 1{y <= x})^2 dx.

    Composite-quadrature evaluation on [lo, hi], split at the observation so
    each piece is smooth.  Warns when the range appears to truncate F's
    support (F(lo) not ~0 or F(hi) not ~1).
    """
    y = float(y)
    if hi <= lo:
        raise ValueError("empty integration range")
    f_lo = float(np.asarray(cdf(np.array([lo])), dtype=float).ravel()[0])
    f_hi = float(np.asarray(cdf(np.array([hi])), dtype=float).ravel()[0])
    if f_lo > 1e-3 or f_hi < 1.0 - 1e-3:
        warnings.warn(
            f"crps integration range [{lo}, {hi}] may truncate the forecast "
            f"support (F(lo)={f_lo:.3g}, F(hi)={f_hi:.3g})",
            RuntimeWarning,
            stacklevel=2,
        )

    def below(x):
        return np.asarray(cdf(x), dtype=float) ** 2

    def above(x):
        return (np.asarray(cdf(x), dtype=float) - 1.0) ** 2

    if y <= lo:
        return _composite_simpson(above, lo, hi, panels)
    if y >= hi:
        return _composite_simpson(below, lo, hi, panels)
    return _composite_simpson(below, lo, y, panels) + _composite_simpson(above, y, hi, panels)
