"""Command-line interface for running the bundled experiments.

Subcommands:
  run            execute an experiment described by an INI config file
  list-catalog   show bundled forecasts and data models
  dump-catalog   write catalog surfaces/curves to CSV for plotting

Experiment kinds (the [experiment] ``kind`` key):
  intensity             pairwise preference table for intensity forecasts
                        (score = combined | poisson)
  product               pairwise preference table for product-density forecasts
  hawkes                exact vs interval scoring of conditional intensities
  convergence-spatial   binned-vs-exact score gap over grid refinements
  convergence-temporal  interval-vs-exact score gap over partition sizes
  infogain              per-event information gain against a reference forecast

Exit codes: 0 success, 2 usage/config error, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import math
import os
import sys
from pathlib import Path

import numpy as np

from .catalog import (
    build_forecast,
    build_model,
    data_model_catalog,
    forecast_catalog,
)
from .evaluation import (
    run_convergence_spatial,
    run_convergence_temporal,
    run_hawkes_experiment,
    run_preference_experiment,
)
from .pp_scores import (
    score_intensity_combined,
    score_intensity_poisson,
    score_product_density,
)

__all__ = ["main"]


class UsageError(Exception):
    """Configuration or invocation problem; maps to exit code 2."""


# ---------------------------------------------------------------------------
# config parsing
# ---------------------------------------------------------------------------

_KINDS = ("intensity", "product", "hawkes", "convergence-spatial",
          "convergence-temporal", "infogain")
_EXPERIMENT_KEYS = {
    "kind", "model", "score", "c", "alpha", "patterns_per_rep", "reps", "seed",
    "interval_n", "reference", "n_values",
}


def _load_config(path: str) -> configparser.ConfigParser:
    if not os.path.isfile(path):
        raise UsageError(f"config file not found: {path}")
    cfg = configparser.ConfigParser()
    try:
        cfg.read(path)
    except configparser.Error as exc:
        raise UsageError(f"cannot parse config {path}: {exc}") from exc
    if not cfg.has_section("experiment"):
        raise UsageError(f"config {path} has no [experiment] section")
    unknown = set(cfg["experiment"]) - _EXPERIMENT_KEYS
    if unknown:
        raise UsageError(
            f"unknown [experiment] key(s) {sorted(unknown)}; "
            f"allowed: {sorted(_EXPERIMENT_KEYS)}"
        )
    return cfg


def _require(section, key: str) -> str:
    value = section.get(key)
    if value is None or not value.strip():
        raise UsageError(f"missing required [experiment] key: {key}")
    return value.strip()


def _get_int(section, key: str, default=None) -> int:
    raw = section.get(key)
    if raw is None:
        if default is None:
            raise UsageError(f"missing required [experiment] key: {key}")
        return default
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"[experiment] {key} must be an integer, got {raw!r}")


def _get_float(section, key: str, default=None) -> float:
    raw = section.get(key)
    if raw is None:
        if default is None:
            raise UsageError(f"missing required [experiment] key: {key}")
        return default
    try:
        return float(raw)
    except ValueError:
        raise UsageError(f"[experiment] {key} must be a number, got {raw!r}")


def _parse_n_values(raw: str) -> list:
    """Comma list with inclusive colon ranges: '1:5,10' -> [1,2,3,4,5,10]."""
    values = []
    for chunk in raw.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        if ":" in chunk:
            lo_s, _, hi_s = chunk.partition(":")
            try:
                lo, hi = int(lo_s), int(hi_s)
            except ValueError:
                raise UsageError(f"bad n_values range {chunk!r}")
            if hi < lo:
                raise UsageError(f"bad n_values range {chunk!r}")
            values.extend(range(lo, hi + 1))
        else:
            try:
                values.append(int(chunk))
            except ValueError:
                raise UsageError(f"bad n_values entry {chunk!r}")
    if not values or any(v < 1 for v in values):
        raise UsageError(f"n_values must be positive integers, got {raw!r}")
    return values


def _parse_forecasts(cfg: configparser.ConfigParser):
    if not cfg.has_section("forecasts"):
        raise UsageError("config has no [forecasts] section")
    section = cfg["forecasts"]
    raw_names = section.get("names")
    if not raw_names:
        raise UsageError("[forecasts] must list names = f0, f1, ...")
    names = [n.strip() for n in raw_names.split(",") if n.strip()]
    overrides = {}
    for key, value in section.items():
        if key == "names":
            continue
        if "." not in key:
            raise UsageError(
                f"[forecasts] key {key!r} is neither 'names' nor '<name>.<param>'"
            )
        fname, _, param = key.partition(".")
        if fname not in names:
            raise UsageError(f"[forecasts] override for unlisted forecast {fname!r}")
        try:
            overrides.setdefault(fname, {})[param] = float(value)
        except ValueError:
            raise UsageError(f"[forecasts] {key} must be a number, got {value!r}")
    return names, overrides


def _parse_model_overrides(cfg: configparser.ConfigParser) -> dict:
    if not cfg.has_section("model"):
        return {}
    out = {}
    for key, value in cfg["model"].items():
        try:
            out[key] = float(value)
        except ValueError:
            raise UsageError(f"[model] {key} must be a number, got {value!r}")
    return out


# ---------------------------------------------------------------------------
# CSV writers (deterministic float formatting)
# ---------------------------------------------------------------------------

def _fmt(value) -> str:
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return format(value, ".17g")
    return str(value)


def _write_rows(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def write_scores_csv(path: Path, scores: np.ndarray, names) -> None:
    """(rep, pattern_idx, forecast, score, finite_flag) rows."""
    rows = []
    reps, patterns, _ = scores.shape
    for r in range(reps):
        for p in range(patterns):
            for fi, name in enumerate(names):
                val = float(scores[r, p, fi])
                rows.append((r, p, name, val, int(np.isfinite(val))))
    _write_rows(path, ["rep", "pattern_idx", "forecast", "score", "finite_flag"], rows)


def write_dm_csv(path: Path, records) -> None:
    rows = [(rec.rep, rec.forecast_a, rec.forecast_b, rec.delta, rec.stat,
             rec.p_value, rec.decision) for rec in records]
    _write_rows(path, ["rep", "forecast_a", "forecast_b", "delta", "t", "p", "decision"],
                rows)


def write_table_csv(path: Path, table) -> None:
    header = ["forecast"] + list(table.names)
    rows = []
    for i, name in enumerate(table.names):
        row = [name]
        for j in range(len(table.names)):
            row.append("" if i == j else _fmt(float(table.fraction[i, j])))
        rows.append(row)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def write_convergence_csv(path: Path, rows) -> None:
    _write_rows(path, ["n", "forecast", "mean_corrected_diff"],
                [(row.n, row.forecast, row.mean_corrected_diff) for row in rows])


def write_infogain_csv(path: Path, names, infogain: np.ndarray) -> None:
    rows = []
    for r in range(infogain.shape[0]):
        for fi, name in enumerate(names):
            rows.append((r, name, float(infogain[r, fi])))
    _write_rows(path, ["rep", "forecast", "infogain"], rows)


def _print_table(table) -> None:
    names = table.names
    width = max(6, max(len(n) for n in names) + 2)
    print(f"preference fractions (row preferred over column), reps={table.reps}:")
    print(" " * width + "".join(f"{n:>{width}}" for n in names))
    for i, name in enumerate(names):
        cells = []
        for j in range(len(names)):
            cells.append("-" if i == j else f"{table.fraction[i, j]:.2f}")
        print(f"{name:>{width}}" + "".join(f"{c:>{width}}" for c in cells))
    if table.dropped.max() > 0:
        print(f"dropped repetitions (max over pairs): {int(table.dropped.max())}")


# ---------------------------------------------------------------------------
# subcommand: run
# ---------------------------------------------------------------------------

def _cmd_run(args) -> int:
    cfg = _load_config(args.config)
    exp = cfg["experiment"]
    kind = _require(exp, "kind")
    if kind not in _KINDS:
        raise UsageError(f"unknown experiment kind {kind!r}; allowed: {list(_KINDS)}")

    seed = args.seed if args.seed is not None else _get_int(exp, "seed")
    reps = args.reps if args.reps is not None else _get_int(exp, "reps")
    if reps < 1:
        raise UsageError(f"reps must be >= 1, got {reps}")
    threads = args.threads
    alpha = _get_float(exp, "alpha", 0.05)

    model_name = _require(exp, "model")
    try:
        model = build_model(model_name, **_parse_model_overrides(cfg))
    except ValueError as exc:
        raise UsageError(str(exc))

    names, overrides = _parse_forecasts(cfg)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    if kind in ("intensity", "product"):
        if kind == "intensity":
            score = exp.get("score", "combined").strip()
            if score == "combined":
                c = _get_float(exp, "c", 0.1)
                scorer = lambda f, p: score_intensity_combined(f, p, c=c)
            elif score == "poisson":
                scorer = lambda f, p: score_intensity_poisson(f, p)
            else:
                raise UsageError(
                    f"unknown score {score!r} for kind intensity; "
                    "allowed: combined, poisson"
                )
            forecasts = _build_forecasts("intensity", names, overrides)
        else:
            score = exp.get("score", "product").strip()
            if score != "product":
                raise UsageError(
                    f"kind product uses score = product, got {score!r}"
                )
            c = _get_float(exp, "c", 1e-5)
            scorer = lambda f, p: score_product_density(f, p, c)
            forecasts = _build_forecasts("product", names, overrides)
        if model.kind != "spatial":
            raise UsageError(f"model {model_name!r} is not spatial")
        patterns_per_rep = _get_int(exp, "patterns_per_rep", 20)
        table = run_preference_experiment(
            model, forecasts, scorer,
            reps=reps, patterns_per_rep=patterns_per_rep, master_seed=seed,
            alpha=alpha, n_jobs=threads,
        )
        write_scores_csv(out_dir / "scores.csv", table.scores, table.names)
        write_dm_csv(out_dir / "dm.csv", table.records)
        write_table_csv(out_dir / "table.csv", table)
        _print_table(table)
        print(f"wrote scores.csv, dm.csv, table.csv to {out_dir}")
        return 0

    if kind == "convergence-spatial":
        n_values = _parse_n_values(_require(exp, "n_values"))
        forecasts = _build_forecasts("intensity", names, overrides)
        if model.kind != "spatial":
            raise UsageError(f"model {model_name!r} is not spatial")
        rows = run_convergence_spatial(
            model, forecasts, n_values,
            reps=reps, master_seed=seed,
            patterns_per_rep=_get_int(exp, "patterns_per_rep", 1),
        )
        write_convergence_csv(out_dir / "convergence.csv", rows)
        print(f"wrote convergence.csv ({len(rows)} rows) to {out_dir}")
        return 0

    if kind == "convergence-temporal":
        n_values = _parse_n_values(_require(exp, "n_values"))
        forecasts = _build_forecasts("temporal", names, overrides)
        if model.kind != "temporal":
            raise UsageError(f"model {model_name!r} is not temporal")
        rows = run_convergence_temporal(
            model, forecasts, n_values,
            reps=reps, master_seed=seed, n_jobs=threads,
        )
        write_convergence_csv(out_dir / "convergence.csv", rows)
        print(f"wrote convergence.csv ({len(rows)} rows) to {out_dir}")
        return 0

    if kind == "infogain":
        forecasts = _build_forecasts("temporal", names, overrides)
        if model.kind != "temporal":
            raise UsageError(f"model {model_name!r} is not temporal")
        reference = _require(exp, "reference").strip()
        if reference not in names:
            raise UsageError(f"reference {reference!r} not among forecasts {names}")
        result = run_hawkes_experiment(
            model, forecasts,
            reps=reps, master_seed=seed,
            interval_n=_get_int(exp, "interval_n", 1000),
            reference=reference, n_jobs=threads,
        )
        write_infogain_csv(out_dir / "infogain.csv", result.names, result.infogain)
        for name in result.names:
            if name != result.reference:
                col = result.names.index(name)
                gains = result.infogain[:, col]
                finite = gains[np.isfinite(gains)]
                print(f"mean information gain {name} over {result.reference}: "
                      f"{float(finite.mean()):.4f}")
        print(f"wrote infogain.csv to {out_dir}")
        return 0

    # kind == "hawkes"
    forecasts = _build_forecasts("temporal", names, overrides)
    if model.kind != "temporal":
        raise UsageError(f"model {model_name!r} is not temporal")
    reference = exp.get("reference")
    if reference is not None:
        reference = reference.strip()
        if reference not in names:
            raise UsageError(f"reference {reference!r} not among forecasts {names}")
    result = run_hawkes_experiment(
        model, forecasts,
        reps=reps, master_seed=seed,
        interval_n=_get_int(exp, "interval_n", 1000),
        reference=reference, n_jobs=threads,
    )
    write_scores_csv(out_dir / "scores.csv", result.exact[:, None, :], result.names)
    write_scores_csv(out_dir / "scores_interval.csv", result.interval[:, None, :],
                     result.names)
    write_infogain_csv(out_dir / "infogain.csv", result.names, result.infogain)
    print(f"exact-vs-interval ranking agreement at n={result.interval_n}: "
          f"{result.agreement:.3f}")
    for name in result.names:
        if name != result.reference:
            print(f"median exact-score margin {name} - {result.reference}: "
                  f"{result.median_margin(name, result.reference):.3f}")
    print(f"wrote scores.csv, scores_interval.csv, infogain.csv to {out_dir}")
    return 0


def _build_forecasts(fkind: str, names, overrides):
    try:
        return [(name, build_forecast(fkind, name, **overrides.get(name, {})))
                for name in names]
    except ValueError as exc:
        raise UsageError(str(exc))


# ---------------------------------------------------------------------------
# subcommand: list-catalog / dump-catalog
# ---------------------------------------------------------------------------

_KIND_TITLES = (
    ("intensity", "spatial intensity forecasts"),
    ("product", "second-order product density forecasts"),
    ("temporal", "temporal conditional-intensity forecasts"),
)


def _fmt_defaults(defaults) -> str:
    return ", ".join(f"{k}={v:g}" for k, v in defaults.items())


def _cmd_list_catalog(args) -> int:
    for kind, title in _KIND_TITLES:
        print(f"{title}:")
        for name, spec in forecast_catalog(kind).items():
            print(f"  {name}: {spec.formula}   [{_fmt_defaults(spec.defaults)}]")
        print()
    print("data models:")
    for name, spec in data_model_catalog().items():
        print(f"  {name}: {spec.description}   [{_fmt_defaults(spec.defaults)}]")
    return 0


def _cmd_dump_catalog(args) -> int:
    kind = args.kind
    grid = args.grid
    if grid < 2:
        raise UsageError("--grid must be >= 2")
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    cat = forecast_catalog(kind)
    rows = []
    if kind == "intensity":
        axis = np.linspace(0.0, 1.0, grid)
        xx, yy = np.meshgrid(axis, axis, indexing="ij")
        pts = np.stack([xx.ravel(), yy.ravel()], axis=1)
        for name, spec in cat.items():
            f = spec.build()
            vals = f.density_at(pts)
            for (x, y), v in zip(pts, vals):
                rows.append((name, float(x), float(y), float(v)))
        _write_rows(out, ["forecast", "x", "y", "value"], rows)
    elif kind == "product":
        r = np.linspace(0.0, 0.3, grid)
        for name, spec in cat.items():
            f = spec.build()
            vals = np.asarray(f.radial(r), dtype=float)
            for ri, v in zip(r, vals):
                rows.append((name, float(ri), float(v)))
        _write_rows(out, ["forecast", "r", "value"], rows)
    else:  # temporal
        t = np.linspace(0.0, 1.5, grid)
        for name, spec in cat.items():
            f = spec.build()
            vals = np.asarray(f.trigger.value(t), dtype=float)
            for ti, v in zip(t, vals):
                rows.append((name, float(ti), float(v)))
        _write_rows(out, ["forecast", "t", "value"], rows)
    print(f"wrote {len(rows)} rows to {out}")
    return 0


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ppscores",
        description="Consistent scoring of point-process forecasts: "
                    "simulation experiments and catalog tools.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment from an INI config")
    run.add_argument("--config", required=True, help="path to the INI config file")
    run.add_argument("--seed", type=int, default=None, help="override [experiment] seed")
    run.add_argument("--reps", type=int, default=None, help="override [experiment] reps")
    run.add_argument("--out", default="results", help="output directory (default: results)")
    run.add_argument("--threads", type=int, default=1,
                     help="worker processes for repetitions (default: 1)")
    run.set_defaults(func=_cmd_run)

    lst = sub.add_parser("list-catalog", help="list bundled forecasts and models")
    lst.set_defaults(func=_cmd_list_catalog)

    dump = sub.add_parser("dump-catalog", help="dump catalog curves/surfaces to CSV")
    dump.add_argument("--kind", required=True,
                      choices=["intensity", "product", "temporal"])
    dump.add_argument("--out", required=True, help="output CSV path")
    dump.add_argument("--grid", type=int, default=101,
                      help="points per axis (default: 101)")
    dump.set_defaults(func=_cmd_dump_catalog)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # runtime failure
        print(f"runtime failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
