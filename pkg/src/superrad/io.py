"""CSV emission and parsing with a ``#`` metadata header.

Files look like::

    # superrad_version = 0.1.0
    # k0R = 0.466
    t,I_mean,I_stderr,C_mean,C_stderr
    0,3,0,0,0
    ...

Floats are written with 17 significant digits, so reading a file back gives
the emitted values bit for bit. Writes are atomic: data goes to a temporary
file in the target directory which is then renamed over the destination.
"""

from __future__ import annotations

import csv
import os
import tempfile
from pathlib import Path

import numpy as np

from .ensemble import SweepResult, SweepRow
from .observables import TimeSeries
from .propagator import TimeGrid

SERIES_COLUMNS = ("t", "I_mean", "I_stderr", "C_mean", "C_stderr")
SWEEP_COLUMNS = ("k0R", "A_I", "t_I", "A_C", "t_C", "A_I_stderr", "A_C_stderr", "n_samples")
_SWEEP_FIELDS = (
    "k0R",
    "a_intensity",
    "t_intensity",
    "a_coherence",
    "t_coherence",
    "a_intensity_stderr",
    "a_coherence_stderr",
    "n_samples",
)


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return "%.17g" % x


def write_csv(path, columns: dict, meta: dict | None = None):
    """Write equal-length ``columns`` (name -> sequence) to ``path`` atomically."""
    path = Path(path)
    names = list(columns)
    data = [list(columns[n]) for n in names]
    if len({len(d) for d in data}) > 1:
        raise ValueError("columns differ in length")
    directory = path.parent if str(path.parent) else Path(".")
    if not directory.is_dir():
        raise FileNotFoundError(f"output directory {str(directory)!r} does not exist")
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            for key, value in (meta or {}).items():
                fh.write(f"# {key} = {value}\n")
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(names)
            for row in zip(*data):
                writer.writerow([_fmt(v) for v in row])
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def read_csv(path):
    """``(meta, columns)`` with metadata values as strings and columns as float arrays."""
    meta = {}
    with open(path, newline="") as fh:
        lines = fh.read().splitlines()
    body = []
    for line in lines:
        if line.startswith("#"):
            key, sep, value = line[1:].partition("=")
            if sep:
                meta[key.strip()] = value.strip()
        elif line.strip():
            body.append(line)
    if not body:
        raise ValueError(f"{path}: no header row")
    rows = list(csv.reader(body))
    names = rows[0]
    values = np.array([[float(v) for v in r] for r in rows[1:]], dtype=float).reshape(-1, len(names))
    return meta, {n: values[:, k] for k, n in enumerate(names)}


def write_series(path, series: TimeSeries, meta: dict | None = None):
    meta = dict(meta or {})
    meta.setdefault("spacing_mode", series.grid.spacing_mode)
    meta.setdefault("n_samples", series.n_samples)
    zeros = np.zeros(len(series.grid))
    i_err = series.intensity_stderr if series.intensity_stderr is not None else zeros
    c_err = series.coherence_stderr if series.coherence_stderr is not None else zeros
    cols = dict(zip(SERIES_COLUMNS, (series.t, series.intensity, i_err, series.coherence, c_err)))
    write_csv(path, cols, meta)


def read_series(path) -> TimeSeries:
    meta, cols = read_csv(path)
    grid = TimeGrid(cols["t"], meta.get("spacing_mode", "uniform"))
    return TimeSeries(
        grid,
        cols["I_mean"],
        cols["C_mean"],
        cols["I_stderr"],
        cols["C_stderr"],
        n_samples=int(meta.get("n_samples", 1)),
    )


def write_sweep(path, result: SweepResult, meta: dict | None = None):
    meta = dict(meta or {})
    meta.setdefault("n_atoms", result.n_atoms)
    meta.setdefault("regime", result.regime)
    meta.setdefault("initial", result.initial)
    cols = {}
    for name, attr in zip(SWEEP_COLUMNS, _SWEEP_FIELDS):
        vals = [getattr(r, attr) for r in result.rows]
        cols[name] = [int(v) for v in vals] if attr == "n_samples" else vals
    write_csv(path, cols, meta)


def read_sweep(path) -> SweepResult:
    meta, cols = read_csv(path)
    rows = []
    for k in range(len(cols["k0R"])):
        kw = {attr: float(cols[name][k]) for name, attr in zip(SWEEP_COLUMNS, _SWEEP_FIELDS)}
        kw["n_samples"] = int(kw["n_samples"])
        rows.append(SweepRow(**kw))
    return SweepResult(
        rows,
        int(meta.get("n_atoms", 3)),
        meta.get("regime", "exact"),
        meta.get("initial", "fully_excited"),
    )
