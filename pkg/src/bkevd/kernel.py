"""Delay embedding, Gaussian kernels and bandwidth calibration.

Spatiotemporal snapshots are turned into product states: one state per
(time, grid point) pair, represented by the Q-vector of the field's recent
history at that grid point.  A Gaussian kernel

    k(w, w') = exp(-||w - w'||^2 / (eps Q))

compares product states.  Kernel matrices are never formed densely at full
scale; instead a :class:`KernelOracle` evaluates entries, columns and the
diagonal on demand.

Bandwidth calibration is two-staged: a median rule over a random subsample
fixes the scale, and a scaling (log-log slope) criterion over a log-spaced
grid refines it on an informed subset.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDataError
from .ks import SpatiotemporalDataset

__all__ = [
    "DelayEmbeddedProductStates",
    "GaussianKernelConfig",
    "KernelOracle",
    "GaussianKernelOracle",
    "DenseMatrixOracle",
    "CountingOracle",
    "delay_embed",
    "gaussian_entry",
    "gaussian_gram",
    "gaussian_cross",
    "median_bandwidth",
    "default_epsilon_grid",
    "scaling_refine_bandwidth",
]


@dataclass
class DelayEmbeddedProductStates:
    """Row-per-product-state matrix of delay vectors.

    Row ``i`` corresponds to the product state (time index ``i // n_space``,
    grid index ``i % n_space``).  Each row stores the present sample first,
    followed by the ``delays - 1`` samples reaching backward in time.
    """

    vectors: np.ndarray  # (n_time * n_space, delays)
    n_time: int
    n_space: int
    delays: int
    sample_dt: float

    @property
    def n_states(self) -> int:
        return self.vectors.shape[0]


@dataclass(frozen=True)
class GaussianKernelConfig:
    """Bandwidth and delay count entering the Gaussian kernel exponent."""

    epsilon: float
    delays: int

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.delays < 1:
            raise ValueError("delays must be at least 1")

    @property
    def scale(self) -> float:
        return self.epsilon * self.delays


def delay_embed(data: SpatiotemporalDataset, delays: int) -> DelayEmbeddedProductStates:
    """Form delay vectors for every product state of a dataset.

    With S source snapshots, the first usable time index is ``delays - 1``;
    the output covers ``n_time = S - delays + 1`` snapshot times, each paired
    with every grid point.

    Raises
    ------
    ValueError
        If the dataset holds fewer than ``delays`` snapshots.
    """
    if delays < 1:
        raise ValueError("delays must be at least 1")
    n_snap, m = data.snapshots.shape
    if n_snap < delays:
        raise ValueError(f"need at least {delays} snapshots, dataset has {n_snap}")
    n_time = n_snap - delays + 1
    emb = np.empty((n_time, m, delays))
    for q in range(delays):
        emb[:, :, q] = data.snapshots[delays - 1 - q : delays - 1 - q + n_time, :]
    return DelayEmbeddedProductStates(
        emb.reshape(n_time * m, delays), n_time, m, delays, data.sample_dt
    )


def gaussian_entry(wi, wj, cfg: GaussianKernelConfig) -> float:
    """Kernel value for one pair of delay vectors; equals 1 iff wi == wj."""
    wi = np.asarray(wi, dtype=np.float64)
    wj = np.asarray(wj, dtype=np.float64)
    if wi.shape != wj.shape or wi.ndim != 1 or wi.shape[0] != cfg.delays:
        raise ValueError("delay vectors must be 1-d with length cfg.delays")
    return float(np.exp(-np.sum((wi - wj) ** 2) / cfg.scale))


def _sq_dists_to_point(vectors, sqnorms, j):
    d2 = sqnorms + sqnorms[j] - 2.0 * (vectors @ vectors[j])
    np.maximum(d2, 0.0, out=d2)
    return d2


def gaussian_cross(a, b, cfg: GaussianKernelConfig) -> np.ndarray:
    """Kernel block k(a_i, b_j) between two sets of delay vectors."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    d2 = (
        np.sum(a**2, axis=1)[:, None]
        + np.sum(b**2, axis=1)[None, :]
        - 2.0 * (a @ b.T)
    )
    np.maximum(d2, 0.0, out=d2)
    return np.exp(-d2 / cfg.scale)


def gaussian_gram(vectors, cfg: GaussianKernelConfig) -> np.ndarray:
    """Dense symmetric kernel matrix with exact unit diagonal."""
    k = gaussian_cross(vectors, vectors, cfg)
    k = 0.5 * (k + k.T)
    np.fill_diagonal(k, 1.0)
    return k


class KernelOracle:
    """Lazy access to an implicit symmetric PSD kernel matrix."""

    def size(self) -> int:
        raise NotImplementedError

    def entry(self, i: int, j: int) -> float:
        raise NotImplementedError

    def column(self, j: int) -> np.ndarray:
        raise NotImplementedError

    def diagonal(self) -> np.ndarray:
        raise NotImplementedError


class GaussianKernelOracle(KernelOracle):
    """Gaussian kernel matrix over a set of delay vectors, evaluated lazily.

    ``column(j)`` costs one matrix-vector product over the stored vectors;
    the diagonal is exactly one by construction.
    """

    def __init__(self, vectors, cfg: GaussianKernelConfig):
        self.vectors = np.ascontiguousarray(np.asarray(vectors, dtype=np.float64))
        if self.vectors.ndim != 2 or self.vectors.shape[1] != cfg.delays:
            raise ValueError("vectors must be (n_states, cfg.delays)")
        self.cfg = cfg
        self._sqnorms = np.sum(self.vectors**2, axis=1)

    def size(self) -> int:
        return self.vectors.shape[0]

    def entry(self, i: int, j: int) -> float:
        return gaussian_entry(self.vectors[i], self.vectors[j], self.cfg)

    def column(self, j: int) -> np.ndarray:
        d2 = _sq_dists_to_point(self.vectors, self._sqnorms, j)
        col = np.exp(-d2 / self.cfg.scale)
        col[j] = 1.0
        return col

    def diagonal(self) -> np.ndarray:
        return np.ones(self.size())


class DenseMatrixOracle(KernelOracle):
    """Oracle view of an explicitly stored symmetric PSD matrix."""

    def __init__(self, matrix):
        a = np.asarray(matrix, dtype=np.float64)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("matrix must be square")
        if not np.allclose(a, a.T, atol=1e-12 * max(1.0, np.abs(a).max())):
            raise ValueError("matrix must be symmetric")
        self.matrix = a

    def size(self) -> int:
        return self.matrix.shape[0]

    def entry(self, i: int, j: int) -> float:
        return float(self.matrix[i, j])

    def column(self, j: int) -> np.ndarray:
        return self.matrix[:, j].copy()

    def diagonal(self) -> np.ndarray:
        return np.diag(self.matrix).copy()


class CountingOracle(KernelOracle):
    """Wrapper counting how many kernel entries the inner oracle evaluates."""

    def __init__(self, inner: KernelOracle):
        self.inner = inner
        self.entry_evaluations = 0

    def size(self) -> int:
        return self.inner.size()

    def entry(self, i: int, j: int) -> float:
        self.entry_evaluations += 1
        return self.inner.entry(i, j)

    def column(self, j: int) -> np.ndarray:
        self.entry_evaluations += self.inner.size()
        return self.inner.column(j)

    def diagonal(self) -> np.ndarray:
        self.entry_evaluations += self.inner.size()
        return self.inner.diagonal()


def median_bandwidth(
    embedded: DelayEmbeddedProductStates, subsample: int = 2048, seed=0
) -> float:
    """Median-rule bandwidth estimate.

    Draws a uniform random subsample of product states (without replacement
    when possible), computes all pairwise squared distances, and returns
    their median divided by the delay count, so that the kernel exponent at
    the median distance equals -1.

    Raises
    ------
    DegenerateDataError
        If the median pairwise distance is zero.
    """
    if subsample < 2:
        raise ValueError("subsample must be at least 2")
    rng = np.random.default_rng(seed)
    n = embedded.n_states
    take = min(subsample, n)
    idx = rng.choice(n, size=take, replace=False) if take < n else np.arange(n)
    w = embedded.vectors[idx]
    sq = np.sum(w**2, axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (w @ w.T)
    np.maximum(d2, 0.0, out=d2)
    pairs = d2[np.triu_indices(take, k=1)]
    med = float(np.median(pairs))
    if med <= 0.0:
        raise DegenerateDataError("median pairwise distance is zero; samples are identical")
    return med / embedded.delays


def default_epsilon_grid(eps0: float, points: int = 64, span: float = 1e3) -> np.ndarray:
    """Log-spaced bandwidth grid spanning [eps0/span, eps0*span]."""
    if eps0 <= 0:
        raise ValueError("eps0 must be positive")
    return np.geomspace(eps0 / span, eps0 * span, points)


def scaling_refine_bandwidth(embedded_subset: DelayEmbeddedProductStates, eps_grid) -> float:
    """Refine a bandwidth by the kernel-sum scaling criterion.

    Computes T(eps) = sum_ij exp(-||w_i - w_j||^2 / (eps Q)) over the given
    subset for every grid value and returns the grid point maximizing the
    centered finite-difference slope of log T against log eps.  The slope is
    defined at interior grid points only; ties resolve to the smallest
    bandwidth.
    """
    grid = np.asarray(eps_grid, dtype=np.float64)
    if grid.ndim != 1 or grid.shape[0] < 3:
        raise ValueError("eps_grid must hold at least 3 values")
    if np.any(grid <= 0):
        raise ValueError("eps_grid values must be positive")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("eps_grid must be strictly increasing")

    w = embedded_subset.vectors
    n = w.shape[0]
    sq = np.sum(w**2, axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (w @ w.T)
    np.maximum(d2, 0.0, out=d2)
    pairs = d2[np.triu_indices(n, k=1)]

    q = embedded_subset.delays
    # T includes the n self-pairs plus each unordered pair twice.
    t = np.array([n + 2.0 * np.sum(np.exp(-pairs / (eps * q))) for eps in grid])
    log_t = np.log(t)
    log_eps = np.log(grid)
    slopes = (log_t[2:] - log_t[:-2]) / (log_eps[2:] - log_eps[:-2])
    return float(grid[1:-1][np.argmax(slopes)])
