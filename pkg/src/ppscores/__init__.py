"""Consistent scoring functions for spatial and temporal point-process forecasts.

The package provides the scoring functions themselves (`pp_scores`), the scalar
building blocks they are assembled from (`elementary`), point-pattern data types
(`patterns`), samplers for the data-generating processes of the simulation study
(`simulate`), named forecast/model catalogs (`catalog`), and the score-difference
evaluation harness (`evaluation`).  `cli` exposes a config-driven runner.
"""

__version__ = "0.1.0"

from . import patterns, elementary, simulate, pp_scores, catalog, evaluation  # noqa: F401
