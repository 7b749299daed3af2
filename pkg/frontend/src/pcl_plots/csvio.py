"""Reading the simulator's trajectory CSV files.

Two layouts are understood: the single-run schema

    t,sx,sy,sz,bloch_norm,entropy,p_plus,p_minus

and the side-by-side comparison schema with ``pcl_`` and ``cl_`` prefixed
columns sharing one time grid.  Lines starting with ``#`` carry
``key=value`` metadata.  This module never recomputes physics; it only
reads what the simulator wrote.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

OBSERVABLES = ("sx", "sy", "sz", "bloch_norm", "entropy", "p_plus", "p_minus")
SINGLE_HEADER = ("t",) + OBSERVABLES


class SchemaError(ValueError):
    """The file does not conform to the trajectory CSV schema."""


@dataclass
class TrajectoryTable:
    """One parsed CSV: a time grid plus named observable columns.

    ``series`` maps a model label ('pcl', 'cl', or '' for unlabeled
    single-run files) to a dict of observable arrays.
    """

    t: np.ndarray
    series: dict
    meta: dict = field(default_factory=dict)
    path: str = ""

    @property
    def labels(self) -> list:
        return list(self.series)

    def column(self, label: str, name: str) -> np.ndarray:
        return self.series[label][name]


def _split_header(header: str) -> dict:
    """Map (label, observable) -> column position, or raise SchemaError."""
    cols = header.split(",")
    if cols == list(SINGLE_HEADER):
        return {("", name): i for i, name in enumerate(cols) if name != "t"}
    if cols[0] != "t":
        raise SchemaError(f"first column must be 't', got {cols[0]!r}")
    layout = {}
    for i, col in enumerate(cols[1:], start=1):
        prefix, _, name = col.partition("_")
        if prefix not in ("pcl", "cl") or name not in OBSERVABLES:
            raise SchemaError(f"unrecognized column {col!r}")
        layout[(prefix, name)] = i
    for prefix in {p for p, _ in layout}:
        missing = [n for n in OBSERVABLES if (prefix, n) not in layout]
        if missing:
            raise SchemaError(f"model {prefix!r} is missing columns {missing}")
    return layout


def read_trajectory(path) -> TrajectoryTable:
    """Parse one CSV file, raising SchemaError on malformed content."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(str(path))
    meta = {}
    header = None
    rows = []
    with open(path) as fh:
        for raw in fh:
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition("=")
                meta[key] = value
                continue
            if header is None:
                header = line
                continue
            rows.append(line)
    if header is None:
        raise SchemaError(f"{path} has no header line")
    layout = _split_header(header)
    if not rows:
        raise SchemaError(f"{path} contains no data rows")
    n_cols = len(header.split(","))
    data = np.empty((len(rows), n_cols))
    for i, line in enumerate(rows):
        parts = line.split(",")
        if len(parts) != n_cols:
            raise SchemaError(f"{path} row {i + 1} has {len(parts)} fields, "
                              f"expected {n_cols}")
        try:
            data[i] = [float(p) for p in parts]
        except ValueError as exc:
            raise SchemaError(f"{path} row {i + 1}: {exc}") from exc
    series: dict = {}
    for (label, name), col in layout.items():
        series.setdefault(label, {})[name] = data[:, col]
    return TrajectoryTable(t=data[:, 0], series=series, meta=meta,
                           path=str(path))


def read_sweep(paths) -> list:
    """Read every member of a sweep, reporting all missing files at once."""
    paths = [Path(p) for p in paths]
    if not paths:
        raise SchemaError("sweep needs at least one member CSV")
    missing = [str(p) for p in paths if not p.exists()]
    if missing:
        raise FileNotFoundError(
            "missing sweep members: " + ", ".join(missing))
    return [read_trajectory(p) for p in paths]
