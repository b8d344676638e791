"""On-disk formats for factors, eigenvector blocks, datasets and reports.

Binary container (used for partial Cholesky factors and eigenvector
blocks), all little-endian:

    int64 N, int64 r, r * int64 index block, N * r * float64 body
    (row-major)

For a factor the index block holds the pivot list; for an eigenvector block
it holds 0..r-1.  Every binary file has a JSON sidecar at the same path
with extension ``.json`` recording provenance (seed, bandwidth, delays,
method, errors).

Dataset container:

    int64 n_snapshots, int64 grid_size, float64 domain_length,
    float64 sample_dt, body row-major float64

CSV files use 17-significant-digit floats so values round-trip bit-exactly.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .ks import SpatiotemporalDataset
from .rpcholesky import PartialCholeskyFactor

__all__ = [
    "fmt",
    "write_json",
    "read_json",
    "save_tall_matrix",
    "load_tall_matrix",
    "save_factor",
    "load_factor",
    "save_dataset",
    "load_dataset",
    "write_eigenvalue_csv",
    "read_eigenvalue_csv",
    "write_heatmap_csv",
    "write_pivots_csv",
]

_HEADER = np.dtype("<i8")
_BODY = np.dtype("<f8")


def fmt(x: float) -> str:
    """Shortest decimal string that round-trips a float64 exactly."""
    return f"{float(x):.17g}"


def write_json(path, payload: dict) -> None:
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def read_json(path) -> dict:
    return json.loads(Path(path).read_text())


def _sidecar(path) -> Path:
    return Path(path).with_suffix(".json")


def save_tall_matrix(path, matrix: np.ndarray, indices: np.ndarray, sidecar: dict | None = None) -> None:
    """Write the binary container; ``indices`` must have one entry per column."""
    matrix = np.asarray(matrix, dtype=np.float64)
    indices = np.asarray(indices, dtype=np.int64)
    n, r = matrix.shape
    if indices.shape != (r,):
        raise ValueError("need exactly one index per column")
    with open(path, "wb") as fh:
        np.array([n, r], dtype=_HEADER).tofile(fh)
        indices.astype(_HEADER).tofile(fh)
        np.ascontiguousarray(matrix, dtype=np.float64).astype(_BODY).tofile(fh)
    if sidecar is not None:
        write_json(_sidecar(path), sidecar)


def load_tall_matrix(path) -> tuple[np.ndarray, np.ndarray]:
    """Read the binary container; returns (matrix, indices)."""
    with open(path, "rb") as fh:
        n, r = (int(v) for v in np.fromfile(fh, dtype=_HEADER, count=2))
        indices = np.fromfile(fh, dtype=_HEADER, count=r).astype(np.int64)
        body = np.fromfile(fh, dtype=_BODY, count=n * r)
    if body.size != n * r:
        raise ValueError(f"truncated container {path}")
    return body.reshape(n, r).astype(np.float64), indices


def save_factor(path, factor: PartialCholeskyFactor, extra: dict | None = None) -> None:
    sidecar = {
        "kind": "partial_cholesky_factor",
        "n": factor.n,
        "rank": factor.rank,
        "rel_trace_error": factor.rel_trace_error,
        "truncated": factor.truncated,
    }
    sidecar.update(extra or {})
    save_tall_matrix(path, factor.factor, factor.pivots, sidecar)


def load_factor(path) -> tuple[np.ndarray, np.ndarray, dict]:
    """Returns (F, pivots, sidecar_dict)."""
    f, pivots = load_tall_matrix(path)
    meta = read_json(_sidecar(path)) if _sidecar(path).exists() else {}
    return f, pivots, meta


def save_dataset(path, data: SpatiotemporalDataset, extra: dict | None = None) -> None:
    with open(path, "wb") as fh:
        np.array([data.n_snapshots, data.grid_size], dtype=_HEADER).tofile(fh)
        np.array([data.domain_length, data.sample_dt], dtype=_BODY).tofile(fh)
        np.ascontiguousarray(data.snapshots, dtype=np.float64).astype(_BODY).tofile(fh)
    sidecar = {
        "kind": "spatiotemporal_dataset",
        "n_snapshots": data.n_snapshots,
        "grid_size": data.grid_size,
        "domain_length": data.domain_length,
        "sample_dt": data.sample_dt,
    }
    sidecar.update(extra or {})
    write_json(_sidecar(path), sidecar)


def load_dataset(path) -> SpatiotemporalDataset:
    with open(path, "rb") as fh:
        n, m = (int(v) for v in np.fromfile(fh, dtype=_HEADER, count=2))
        length, sample_dt = np.fromfile(fh, dtype=_BODY, count=2)
        body = np.fromfile(fh, dtype=_BODY, count=n * m)
    if body.size != n * m:
        raise ValueError(f"truncated dataset {path}")
    grid = -0.5 * length + length * np.arange(m) / m
    return SpatiotemporalDataset(body.reshape(n, m), grid, float(sample_dt))


def write_eigenvalue_csv(path, eigenvalues) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "lambda"])
        for i, lam in enumerate(np.asarray(eigenvalues, dtype=np.float64)):
            writer.writerow([i, fmt(lam)])


def read_eigenvalue_csv(path) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0][:2] != ["index", "lambda"]:
        raise ValueError(f"{path} is not an eigenvalue CSV")
    return np.array([float(r[1]) for r in rows[1:]])


def write_heatmap_csv(path, data: SpatiotemporalDataset) -> None:
    """Matrix-form heatmap export: header 't', s values; one row per time."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t"] + [fmt(s) for s in data.grid])
        for t, row in zip(data.times, data.snapshots):
            writer.writerow([fmt(t)] + [fmt(u) for u in row])


def write_pivots_csv(path, pivots, n_space: int, sample_dt: float, grid) -> None:
    """Pivot product states as (time, space) coordinates for plotting."""
    grid = np.asarray(grid)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["pivot", "time_index", "space_index", "t", "s"])
        for p in np.asarray(pivots, dtype=np.int64):
            ti, si = divmod(int(p), n_space)
            writer.writerow([int(p), ti, si, fmt(ti * sample_dt), fmt(grid[si])])
