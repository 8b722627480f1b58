"""Shared CSV access for the figure scripts.

The scripts are read-only consumers of the experiment CSVs: they load
rows strictly against the frozen column schemas and abort loudly on any
drift, and they never write anything except the requested image.
"""

import csv


def fail(message: str):
    raise SystemExit(f"error: {message}")


def load_rows(path, expected_header):
    """Read a CSV whose header must match ``expected_header`` exactly."""
    expected = list(expected_header)
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        fail(f"cannot read {path}: {exc}")
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != expected:
            fail(
                f"{path}: header {header} does not match the frozen "
                f"schema {expected}"
            )
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(expected):
                fail(f"{path}:{lineno}: expected {len(expected)} fields, got {len(row)}")
            rows.append(dict(zip(expected, row)))
    if not rows:
        fail(f"{path}: no data rows")
    return rows


def ordered_unique(values):
    """Unique values in first-appearance order."""
    seen = {}
    for v in values:
        seen.setdefault(v, None)
    return list(seen)
