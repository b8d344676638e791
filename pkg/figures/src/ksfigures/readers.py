"""Readers for the bkevd pipeline's persisted file formats.

These parse the documented external schemas directly (CSV tables, JSON
sidecars and the little-endian binary container) so the figure scripts
stay decoupled from the library that produced the files.

Schema errors raise :class:`FigureInputError` naming the offending column
or field.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np


class FigureInputError(ValueError):
    """An input file does not conform to its documented schema."""


def read_json(path) -> dict:
    path = Path(path)
    if not path.exists():
        raise FigureInputError(f"missing input file {path}")
    return json.loads(path.read_text())


def read_eigenvalue_csv(path) -> np.ndarray:
    """Columns: index, lambda."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise FigureInputError(f"{path}: empty eigenvalue table")
    header = rows[0]
    for column in ("index", "lambda"):
        if column not in header:
            raise FigureInputError(f"{path}: missing column '{column}'")
    lam_col = header.index("lambda")
    try:
        return np.array([float(r[lam_col]) for r in rows[1:]])
    except (ValueError, IndexError) as exc:
        raise FigureInputError(f"{path}: malformed 'lambda' column: {exc}") from exc


def read_heatmap_csv(path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Matrix form: header 't' plus grid values; rows are t then field values.

    Returns (times, grid, values) with values shaped (n_times, n_grid).
    """
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or not rows[0] or rows[0][0] != "t":
        raise FigureInputError(f"{path}: missing column 't' in heatmap header")
    try:
        grid = np.array([float(v) for v in rows[0][1:]])
        times = np.array([float(r[0]) for r in rows[1:]])
        values = np.array([[float(v) for v in r[1:]] for r in rows[1:]])
    except ValueError as exc:
        raise FigureInputError(f"{path}: malformed heatmap cell: {exc}") from exc
    if values.ndim != 2 or values.shape[1] != grid.shape[0]:
        raise FigureInputError(f"{path}: ragged heatmap rows")
    return times, grid, values


def read_pivots_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Columns: pivot, time_index, space_index, t, s.  Returns (t, s) arrays."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise FigureInputError(f"{path}: empty pivot table")
    header = rows[0]
    for column in ("t", "s"):
        if column not in header:
            raise FigureInputError(f"{path}: missing column '{column}'")
    t_col, s_col = header.index("t"), header.index("s")
    try:
        t = np.array([float(r[t_col]) for r in rows[1:]])
        s = np.array([float(r[s_col]) for r in rows[1:]])
    except ValueError as exc:
        raise FigureInputError(f"{path}: malformed pivot row: {exc}") from exc
    return t, s


def read_vector_container(path) -> tuple[np.ndarray, np.ndarray]:
    """Little-endian binary container: n, r, r indices, n*r float64 body."""
    header = np.dtype("<i8")
    body = np.dtype("<f8")
    with open(path, "rb") as fh:
        counts = np.fromfile(fh, dtype=header, count=2)
        if counts.size != 2:
            raise FigureInputError(f"{path}: truncated container header")
        n, r = (int(v) for v in counts)
        indices = np.fromfile(fh, dtype=header, count=r)
        values = np.fromfile(fh, dtype=body, count=n * r)
    if indices.size != r or values.size != n * r:
        raise FigureInputError(f"{path}: truncated container body")
    return values.reshape(n, r), indices


def load_eigenfunction_fields(vectors_path, dataset_sidecar_path, indices) -> list[np.ndarray]:
    """Reshape eigenvector columns into (n_time, n_space) spatiotemporal fields.

    The product-state convention is row-major over (time, grid point); the
    usable time count is the snapshot count minus the delay count plus one.
    """
    vectors, _ = read_vector_container(vectors_path)
    meta = read_json(Path(vectors_path).with_suffix(".json"))
    data_meta = read_json(dataset_sidecar_path)
    for field in ("delays",):
        if field not in meta:
            raise FigureInputError(f"{vectors_path}: sidecar missing field '{field}'")
    for field in ("n_snapshots", "grid_size"):
        if field not in data_meta:
            raise FigureInputError(f"{dataset_sidecar_path}: missing field '{field}'")
    n_time = int(data_meta["n_snapshots"]) - int(meta["delays"]) + 1
    n_space = int(data_meta["grid_size"])
    if vectors.shape[0] != n_time * n_space:
        raise FigureInputError(
            f"{vectors_path}: {vectors.shape[0]} rows cannot be reshaped to "
            f"({n_time}, {n_space}) product states"
        )
    fields = []
    for idx in indices:
        if not 0 <= idx < vectors.shape[1]:
            raise FigureInputError(f"{vectors_path}: eigenfunction index {idx} out of range")
        fields.append(vectors[:, idx].reshape(n_time, n_space))
    return fields
