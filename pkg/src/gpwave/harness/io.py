"""File formats: CSV tables, wavefunction snapshots and JSON sidecars.

All writes go to a temporary file in the target directory followed by a
rename, so readers never observe a partial file.
"""
from __future__ import annotations

import csv
import json
import os
import re
import tempfile
from pathlib import Path

import numpy as np

from ..fields import Grid, WaveField
from ..series import TimeSeries


def fmt(value) -> str:
    return f"{float(value):.17g}"


def atomic_write_text(path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def csv_text(names, rows) -> str:
    lines = [",".join(names)]
    for row in rows:
        lines.append(",".join(v if isinstance(v, str) else fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def write_series(path, series: TimeSeries) -> Path:
    names = series.names
    cols = [series[n] for n in names]
    return atomic_write_text(path, csv_text(names, zip(*cols)))


def read_series(path) -> TimeSeries:
    with open(path, encoding="utf-8") as fh:
        names = fh.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return TimeSeries({n: data[:, i] for i, n in enumerate(names)})


def csv_rows(path) -> list[dict[str, str]]:
    """Rows of a CSV with mixed text and numeric columns, as strings."""
    with open(path, encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))


def write_json(path, payload) -> Path:
    return atomic_write_text(path, json.dumps(payload, indent=2, sort_keys=True, default=str) + "\n")


_GRID_RE = re.compile(r"#\s*grid\s+x_min=(\S+)\s+x_max=(\S+)\s+n=(\d+)")
_TIME_RE = re.compile(r"#\s*t=(\S+)")


def snapshot_text(field: WaveField) -> str:
    g = field.grid
    lines = [f"# grid x_min={fmt(g.x_min)} x_max={fmt(g.x_max)} n={g.n}", f"# t={fmt(field.t)}"]
    lines += [f"{fmt(x)},{fmt(v.real)},{fmt(v.imag)}" for x, v in zip(g.x, field.values)]
    return "\n".join(lines) + "\n"


def write_snapshot(path, field: WaveField) -> Path:
    """Three columns ``x, re_psi, im_psi`` after a grid line and a time line."""
    return atomic_write_text(path, snapshot_text(field))


def read_snapshot(path) -> WaveField:
    with open(path, encoding="utf-8") as fh:
        grid_line, time_line = fh.readline(), fh.readline()
    gm, tm = _GRID_RE.match(grid_line), _TIME_RE.match(time_line)
    if not gm or not tm:
        raise ValueError(f"{path}: not a snapshot file (bad header)")
    grid = Grid(float(gm.group(1)), float(gm.group(2)), int(gm.group(3)))
    data = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
    if data.shape != (grid.n, 3):
        raise ValueError(f"{path}: expected {grid.n} rows of 3 columns, got {data.shape}")
    return WaveField(grid, data[:, 1] + 1j * data[:, 2], float(tm.group(1)))
