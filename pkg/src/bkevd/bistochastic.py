"""Bistochastic kernel normalization and its low-rank eigendecompositions.

A symmetric kernel matrix K with positive row sums has the bistochastic
normalization

    P = D^-1 K Q^-1 K D^-1,   D = diag(K 1),   Q = diag(K D^-1 1),

a symmetric stochastic matrix whose spectrum lies in [0, 1], with leading
eigenvalue exactly one and a constant leading eigenvector.

Two routes approximate the EVD of P at reduced cost from a rank-r partial
Cholesky factor K ~ F F^T:

dilution
    keeps all N rows.  P~ = G G^T with G = D~^-1 K~ Q~^-1/2 is diagonalized
    through a cascade of one r x r EVD, two tall-skinny QRs and one r x r
    SVD, never forming an N x N matrix.
subsampling
    forms the kernel matrix on the r pivot states only, diagonalizes its
    bistochastic normalization densely, and extends the eigenvectors to all
    N states with the Nystrom formula before a final orthonormalization.

Dense reference paths (:func:`dense_bistochastic` plus a direct EVD) back
both routes in tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NormalizationError, RankError
from .kernel import DelayEmbeddedProductStates, GaussianKernelConfig, gaussian_cross, gaussian_gram
from .linalg import qr_cgs2, svd_small, sym_evd
from .rpcholesky import PartialCholeskyFactor

__all__ = [
    "BistochasticNormalizers",
    "BistochasticEVD",
    "dense_bistochastic",
    "normalizers_from_factor",
    "dilution_evd",
    "subsample_evd",
    "diluted_normalized_evd",
]

POSITIVITY_RTOL = 1e-12  # normalizer entries below this times the max are failures
EXTENSION_EIGENVALUE_FLOOR = 1e-10  # eigenvectors below this are not extended


@dataclass
class BistochasticNormalizers:
    """Row-sum normalizers of an (implicit) kernel matrix.

    ``d`` holds the row sums of K~ and ``q`` the row sums of K~ D~^-1; both
    are strictly positive for a well-defined normalization.
    """

    d: np.ndarray
    q: np.ndarray


@dataclass
class BistochasticEVD:
    """Approximate eigendecomposition of a bistochastic kernel matrix.

    Eigenvalues are clamped to [0, 1] on output; ``raw_eigenvalues`` keeps
    the unclamped values for diagnostics.  Eigenvector columns are
    orthonormal and sign-fixed so the entry of largest magnitude is
    positive.
    """

    eigenvectors: np.ndarray  # (N, r), orthonormal columns
    eigenvalues: np.ndarray  # (r,), descending, in [0, 1]
    raw_eigenvalues: np.ndarray
    method: str = ""


def _fix_signs(phi: np.ndarray) -> np.ndarray:
    flip = phi[np.argmax(np.abs(phi), axis=0), np.arange(phi.shape[1])] < 0
    phi[:, flip] *= -1.0
    return phi


def _finalize(phi, lam, method) -> BistochasticEVD:
    raw = np.asarray(lam, dtype=np.float64).copy()
    return BistochasticEVD(_fix_signs(phi), np.clip(raw, 0.0, 1.0), raw, method)


def dense_bistochastic(k) -> np.ndarray:
    """Bistochastic normalization of an explicit kernel matrix (test path).

    O(N^2) memory; intended for reference computations and small instances.

    Raises
    ------
    NormalizationError
        If any row sum of K or of K D^-1 is not strictly positive.
    """
    k = np.asarray(k, dtype=np.float64)
    if k.ndim != 2 or k.shape[0] != k.shape[1]:
        raise ValueError("kernel matrix must be square")
    if not np.allclose(k, k.T, atol=1e-12 * max(1.0, np.abs(k).max())):
        raise ValueError("kernel matrix must be symmetric")
    if np.any(k < 0):
        raise ValueError("kernel matrix must be entrywise nonnegative")
    d = k.sum(axis=1)
    if np.any(d <= 0):
        raise NormalizationError(f"row sum {int(np.argmin(d))} is not positive")
    a = k / d[:, None]  # D^-1 K
    q = a.T.sum(axis=1)  # row sums of K D^-1
    if np.any(q <= 0):
        raise NormalizationError(f"second-stage row sum {int(np.argmin(q))} is not positive")
    p = (a / q[None, :]) @ a.T
    return 0.5 * (p + p.T)


def normalizers_from_factor(factor: PartialCholeskyFactor) -> BistochasticNormalizers:
    """Normalizers of K~ = F F^T computed in O(Nr) without forming K~.

    Raises
    ------
    NormalizationError
        If any entry of d or q falls at or below ``1e-12`` times the largest
        entry; the message names the first offending index and advises a
        larger factorization rank.
    """
    f = factor.factor
    if f.size == 0:
        raise RankError("cannot normalize an empty factor")
    d = f @ f.sum(axis=0)
    _check_positive(d, "d")
    q = f @ (f.T @ (1.0 / d))
    _check_positive(q, "q")
    return BistochasticNormalizers(d, q)


def _check_positive(vec: np.ndarray, name: str) -> None:
    top = float(np.max(vec))
    thr = POSITIVITY_RTOL * top
    if top <= 0 or np.any(vec <= thr):
        bad = int(np.argmin(vec))
        raise NormalizationError(
            f"normalizer {name}[{bad}] = {vec[bad]:.3e} is not strictly positive; "
            "the low-rank approximation is too coarse here, increase the rank r"
        )


def dilution_evd(factor: PartialCholeskyFactor, set_constant_leading: bool = True) -> BistochasticEVD:
    """Approximate EVD of the bistochastic normalization of K~ = F F^T.

    Cascade: EVD of F^T F gives the right singular vectors of F and the
    spectrum Sigma^2; U = F V Sigma^-1 recovers the left singular vectors;
    two reduced QRs of D~^-1 U and Q~^-1/2 U reduce the factored form
    P~ = G G^T to an r x r SVD, whose left vectors lift back through Q1.
    When ``set_constant_leading`` is on, the leading eigenvector is replaced
    by the exact constant vector and the basis is re-orthonormalized.

    Raises
    ------
    RankError
        If F^T F is numerically rank deficient (smallest eigenvalue at or
        below 1e-12 times the largest), or a QR stage detects dependence.
    NormalizationError
        Propagated from the normalizer computation.
    """
    norms = normalizers_from_factor(factor)
    f = factor.factor
    n, r = f.shape

    v, sigma_sq = sym_evd(f.T @ f)
    if sigma_sq[-1] <= 1e-12 * sigma_sq[0]:
        raise RankError(
            "F^T F is numerically rank deficient; use a smaller rank or another seed"
        )
    sigma = np.sqrt(sigma_sq)
    u = f @ (v / sigma[None, :])

    # Only R is needed from the second factorization; dropping its Q before
    # computing Q1 keeps at most two N x r blocks alive at a time.
    res2 = qr_cgs2(u / np.sqrt(norms.q)[:, None])
    r2, bad2 = res2.r, res2.deficient_columns
    del res2
    q1, r1, bad1 = qr_cgs2(u / norms.d[:, None])
    del u
    if bad1 or bad2:
        raise RankError("scaled singular-vector block lost rank during orthogonalization")

    u1, s1, _ = svd_small((r1 * sigma_sq[None, :]) @ r2.T)
    phi = q1 @ u1
    del q1
    lam = s1**2

    if set_constant_leading:
        phi[:, 0] = 1.0
        phi, _, bad = qr_cgs2(phi)
        if bad:
            raise RankError("re-orthonormalization after constant-column insertion lost rank")
    return _finalize(phi, lam, "dilution")


def subsample_evd(
    embedded: DelayEmbeddedProductStates,
    cfg: GaussianKernelConfig,
    pivots,
    set_constant_leading: bool = False,
) -> BistochasticEVD:
    """Bistochastic EVD on subsampled states, Nystrom-extended to all states.

    The r x r kernel matrix on the pivot states is normalized and
    diagonalized densely.  Every eigenvector with eigenvalue above 1e-10 is
    extended to all N product states by the matrix-consistent Nystrom
    formula: with B = Q~^-1 K~ D~^-1 Phi~ Lambda^-1 precomputed once, the
    extended block is row-normalized kernel cross-evaluations times B.  The
    extended block is orthonormalized by CGS2 QR.

    Raises
    ------
    RankError
        If fewer than two eigenvalues exceed the extension threshold.
    """
    pivots = np.asarray(pivots, dtype=np.int64)
    r = pivots.shape[0]
    if r < 2:
        raise RankError("subsampling needs at least 2 pivot states")
    if len(np.unique(pivots)) != r:
        raise ValueError("pivot indices must be distinct")

    w_sub = embedded.vectors[pivots]
    k_sub = gaussian_gram(w_sub, cfg)
    p_sub = dense_bistochastic(k_sub)
    phi_sub, lam = sym_evd(p_sub)

    keep = lam > EXTENSION_EIGENVALUE_FLOOR
    if int(keep.sum()) < 2:
        raise RankError("fewer than 2 eigenvalues above the Nystrom extension threshold")
    phi_keep = phi_sub[:, keep]
    lam_keep = lam[keep]

    d_sub = k_sub.sum(axis=1)
    q_sub = (k_sub / d_sub[None, :]).sum(axis=1)
    b = (k_sub @ (phi_keep / d_sub[:, None])) / q_sub[:, None] / lam_keep[None, :]

    n = embedded.n_states
    extended = np.empty((n, phi_keep.shape[1]))
    chunk = max(1, int(2**22 // max(r, 1)))  # ~32 MB kernel blocks
    for start in range(0, n, chunk):
        stop = min(start + chunk, n)
        cross = gaussian_cross(embedded.vectors[start:stop], w_sub, cfg)
        row_sums = cross.sum(axis=1)
        if np.any(row_sums <= 0):
            bad = start + int(np.argmin(row_sums))
            raise NormalizationError(
                f"out-of-sample state {bad} has zero kernel mass on the pivot set"
            )
        extended[start:stop] = (cross @ b) / row_sums[:, None]

    phi, _, bad = qr_cgs2(extended)
    del extended
    if bad:
        raise RankError("extended eigenvector block lost rank during orthogonalization")

    if set_constant_leading:
        phi[:, 0] = 1.0
        phi, _, bad = qr_cgs2(phi)
        if bad:
            raise RankError("re-orthonormalization after constant-column insertion lost rank")
    return _finalize(phi, lam_keep, "subsampling")


def diluted_normalized_evd(factor: PartialCholeskyFactor) -> BistochasticEVD:
    """EVD of the symmetric-normalized approximation L~ (cross-check path).

    L~ = (D~^-1/2 F)(D~^-1/2 F)^T is rank revealing, so its EVD follows
    from one r x r EVD of the scaled Gram matrix.  The leading eigenvector
    of L~ is proportional to d^1/2, not constant; the result reuses the
    BistochasticEVD container but only the orthonormality and spectral-range
    invariants apply.
    """
    f = factor.factor
    if f.size == 0:
        raise RankError("cannot normalize an empty factor")
    d = f @ f.sum(axis=0)
    _check_positive(d, "d")
    b = f / np.sqrt(d)[:, None]
    v, lam = sym_evd(b.T @ b)
    good = lam > 1e-14 * max(lam[0], np.finfo(np.float64).tiny)
    u = b @ (v[:, good] / np.sqrt(lam[good])[None, :])
    return _finalize(u, lam[good], "normalized")
