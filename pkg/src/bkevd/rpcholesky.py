"""Randomly pivoted partial Cholesky factorization of an implicit PSD matrix.

The factorization builds A ~ F F^T one pivot at a time: a column index is
drawn with probability proportional to the current residual diagonal, the
corresponding Schur-complement column becomes the next column of F, and the
residual diagonal is downdated (and clamped at zero).  Only the diagonal
and the r sampled columns of A are ever evaluated, so a rank-r run costs at
most N(r+1) kernel evaluations.

For a fixed pivot set S the result equals the column Nystrom approximation
A_S (A_S^S)^+ A_S^T; :func:`column_nystrom` computes that form densely and
serves as the test oracle for the equivalence.

Pivot sampling is bit-reproducible for a fixed seed: a PCG64 generator
supplies one uniform variate per pivot and the index is located by
inverse-CDF search on the cumulative residual diagonal.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .kernel import KernelOracle

__all__ = ["PartialCholeskyFactor", "rpcholesky", "column_nystrom", "trace_error"]


@dataclass
class PartialCholeskyFactor:
    """Rank-r partial Cholesky factor of an N x N PSD matrix.

    ``residual_diag`` holds the clamped diagonal of A - F F^T; it is zero at
    every pivot index.  ``truncated`` marks runs that stopped early because
    the residual vanished (exact low rank reached).  ``trace_history[i]`` is
    the relative trace error after i + 1 pivots.
    """

    factor: np.ndarray  # (N, r)
    pivots: np.ndarray  # (r,) distinct indices
    residual_diag: np.ndarray  # (N,), nonnegative
    rel_trace_error: float
    truncated: bool = False
    trace_history: np.ndarray = field(default_factory=lambda: np.empty(0))

    @property
    def n(self) -> int:
        return self.factor.shape[0]

    @property
    def rank(self) -> int:
        return self.factor.shape[1]


def rpcholesky(oracle: KernelOracle, rank: int, seed) -> PartialCholeskyFactor:
    """Adaptively sampled partial Cholesky factorization.

    Parameters
    ----------
    oracle : KernelOracle
        Implicit symmetric PSD matrix.
    rank : int
        Number of pivots to select, between 1 and the matrix size.
    seed : int or numpy Generator
        Seed for the PCG64 pivot-sampling stream.

    Returns
    -------
    PartialCholeskyFactor
        May carry fewer than ``rank`` columns (with ``truncated=True``) when
        the residual diagonal hits zero early.
    """
    n = oracle.size()
    if not 1 <= rank <= n:
        raise ValueError(f"rank must be in [1, {n}], got {rank}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)

    d = np.asarray(oracle.diagonal(), dtype=np.float64).copy()
    if np.any(d < 0) or not np.all(np.isfinite(d)):
        raise ValueError("oracle diagonal must be finite and nonnegative")
    original_trace = float(d.sum())
    if original_trace <= 0:
        raise ValueError("oracle diagonal has zero trace")
    stop_scale = n * np.finfo(np.float64).eps * float(d.max())

    # F is kept transposed, (rank, N) row-major, so the partial products in
    # the update touch contiguous memory.
    ft = np.zeros((rank, n))
    pivots = np.empty(rank, dtype=np.int64)
    history = np.empty(rank)
    truncated = False
    chosen = 0

    for i in range(rank):
        mass = d.sum()
        if mass <= stop_scale:
            truncated = True
            break
        cum = np.cumsum(d)
        pivot = int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))
        pivot = min(pivot, n - 1)

        g = np.asarray(oracle.column(pivot), dtype=np.float64)
        if i:
            g = g - ft[:i].T @ ft[:i, pivot]
        if g[pivot] <= stop_scale:
            truncated = True
            break
        ft[i] = g / np.sqrt(g[pivot])
        pivots[i] = pivot
        d -= ft[i] ** 2
        np.maximum(d, 0.0, out=d)
        d[pivot] = 0.0
        history[i] = d.sum() / original_trace
        chosen = i + 1

    return PartialCholeskyFactor(
        factor=np.ascontiguousarray(ft[:chosen].T),
        pivots=pivots[:chosen].copy(),
        residual_diag=d,
        rel_trace_error=float(d.sum() / original_trace),
        truncated=truncated,
        trace_history=history[:chosen].copy(),
    )


def column_nystrom(a, pivots) -> np.ndarray:
    """Column Nystrom approximation A_S (A_S^S)^+ A_S^T.

    Dense test oracle: spectral pseudoinverse of the pivot block with
    singular values below ``1e-12 * sigma_max`` truncated.
    """
    a = np.asarray(a, dtype=np.float64)
    s = np.asarray(pivots, dtype=np.int64)
    if len(np.unique(s)) != len(s):
        raise ValueError("pivot indices must be distinct")
    cols = a[:, s]
    block = a[np.ix_(s, s)]
    return cols @ np.linalg.pinv(block, rcond=1e-12, hermitian=True) @ cols.T


def trace_error(factor: PartialCholeskyFactor) -> float:
    """Relative trace-norm error tr(A - F F^T) / tr(A) of a factorization."""
    if factor.rank == 0:
        return 1.0
    return float(min(max(factor.rel_trace_error, 0.0), 1.0))
