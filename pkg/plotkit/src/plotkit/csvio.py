"""Readers for the simulator CLI's CSV artifacts.

Two table schemas are understood — trajectories and sweep tables — plus
the ``.meta`` sidecar the CLI writes next to every CSV, which echoes the
fully-resolved run configuration as ``key = value`` lines. Numeric cells
come back as float arrays with empty fields mapped to NaN; the sweep
table's ``stabilized``/``status`` cells stay strings.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np

TRAJECTORY_COLUMNS = ("t", "w_e", "n_ph", "purity", "trace_dev", "top_fock_pop")
SWEEP_COLUMNS = (
    "axis_value",
    "w_e_min",
    "w_e_max",
    "n_ph_mean",
    "stabilized",
    "status",
)

_TEXT_COLUMNS = {"stabilized", "status"}


class PlotInputError(ValueError):
    """An input file is missing, empty, or does not match its schema."""


def read_table(path, required: tuple[str, ...]) -> dict[str, np.ndarray]:
    """Columns of a CSV file, checked against the columns a plot needs."""
    path = Path(path)
    if not path.exists():
        raise PlotInputError(f"{path}: no such file")
    with open(path, newline="") as handle:
        rows = list(csv.reader(handle))
    if not rows:
        raise PlotInputError(f"{path}: empty file")
    header, data = rows[0], rows[1:]
    for name in required:
        if name not in header:
            raise PlotInputError(f"{path}: missing column {name!r}")
    if not data:
        raise PlotInputError(f"{path}: no data rows")
    columns: dict[str, np.ndarray] = {}
    for j, name in enumerate(header):
        cells = [row[j] if j < len(row) else "" for row in data]
        if name in _TEXT_COLUMNS:
            columns[name] = np.array(cells)
        else:
            columns[name] = np.array(
                [float(cell) if cell else math.nan for cell in cells]
            )
    return columns


def read_sidecar(csv_path) -> dict[str, str]:
    """Key/value pairs from ``<csv>.meta``; comment lines are skipped."""
    path = Path(f"{csv_path}.meta")
    if not path.exists():
        raise PlotInputError(
            f"{path}: no such file (the sidecar supplies axis scaling and labels)"
        )
    pairs: dict[str, str] = {}
    for line in path.read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise PlotInputError(f"{path}: malformed sidecar line {line!r}")
        pairs[key.strip()] = value.strip()
    return pairs
