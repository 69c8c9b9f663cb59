"""CSV dumps and JSON reports."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import IoError
from .fieldcore import Grid1D, ScalarField

REPORT_SCHEMA_VERSION = 1


def _fmt(value) -> str:
    return format(float(value), ".17g")


def emit_csv(data, path, grid: Grid1D | None = None, mask=None, x=None) -> None:
    """Write complex samples as ``x,re,im`` or real samples as ``x,value``.

    ``data`` is a ScalarField or a sample array; arrays take their x column
    from ``grid`` or an explicit ``x``.  Where ``mask`` is False, or a real
    value is NaN, the value cell is left empty.
    """
    if isinstance(data, ScalarField):
        grid = data.grid
        data = data.samples
    values = np.asarray(data)
    if x is None:
        if grid is None:
            raise ValueError("sample arrays need a grid or an x column")
        x = grid.x
    x = np.asarray(x, dtype=float)
    if values.shape != x.shape:
        raise ValueError(f"{values.shape[0]} samples for {x.shape[0]} x values")
    keep = np.ones(x.shape, bool) if mask is None else np.asarray(mask, bool)
    if np.iscomplexobj(values):
        header = "x,re,im"
        rows = [
            f"{_fmt(xi)},{_fmt(v.real)},{_fmt(v.imag)}" if ok else f"{_fmt(xi)},,"
            for xi, v, ok in zip(x, values, keep)
        ]
    else:
        header = "x,value"
        rows = [
            f"{_fmt(xi)},{_fmt(v) if ok and np.isfinite(v) else ''}"
            for xi, v, ok in zip(x, values.astype(float), keep)
        ]
    text = "\n".join([header, *rows]) + "\n"
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def emit_table(columns: dict, path) -> None:
    """Write equal-length columns under a header row."""
    names = list(columns)
    length = len(columns[names[0]])
    lines = [",".join(names)]
    for i in range(length):
        lines.append(",".join(_fmt(columns[name][i]) for name in names))
    try:
        Path(path).write_text("\n".join(lines) + "\n")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def report_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_report(report: dict, path) -> None:
    path = Path(path)
    try:
        if path.parent != Path(""):
            path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(report_json(report))
    except OSError as exc:
        raise IoError(f"cannot write report {path}: {exc}") from exc
