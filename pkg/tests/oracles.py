"""Independent reference implementations used as test oracles.

These are deliberately simple O(n^3)-per-sweep Jacobi-rotation routines,
written separately from the library so the two sides of every comparison
share no code path.
"""

import numpy as np


def jacobi_evd(a, max_sweeps=30, tol=1e-15):
    """Cyclic Jacobi eigenvalue iteration for a symmetric matrix.

    Returns (eigenvalues descending, eigenvectors as columns).
    """
    a = np.array(a, dtype=np.float64)
    n = a.shape[0]
    v = np.eye(n)
    scale = np.linalg.norm(a)
    if scale == 0:
        return np.zeros(n), v
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.tril(a, -1) ** 2))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= tol * scale:
                    continue
                theta = 0.5 * (a[q, q] - a[p, p]) / apq
                t = np.sign(theta) / (abs(theta) + np.hypot(theta, 1.0)) if theta != 0 else 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rot_p = c * a[:, p] - s * a[:, q]
                rot_q = s * a[:, p] + c * a[:, q]
                a[:, p], a[:, q] = rot_p, rot_q
                rot_p = c * a[p, :] - s * a[q, :]
                rot_q = s * a[p, :] + c * a[q, :]
                a[p, :], a[q, :] = rot_p, rot_q
                rot_p = c * v[:, p] - s * v[:, q]
                rot_q = s * v[:, p] + c * v[:, q]
                v[:, p], v[:, q] = rot_p, rot_q
    w = np.diag(a).copy()
    order = np.argsort(w)[::-1]
    return w[order], v[:, order]


def one_sided_jacobi_svd(a, max_sweeps=30, tol=1e-15):
    """One-sided Jacobi SVD of a square matrix.

    Returns (left, singular values descending, right).
    """
    u = np.array(a, dtype=np.float64)
    n = u.shape[1]
    v = np.eye(n)
    scale = np.linalg.norm(u)
    if scale == 0:
        return np.eye(u.shape[0], n), np.zeros(n), v
    for _ in range(max_sweeps):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                alpha = u[:, p] @ u[:, p]
                beta = u[:, q] @ u[:, q]
                gamma = u[:, p] @ u[:, q]
                if abs(gamma) <= tol * scale * scale:
                    continue
                rotated = True
                zeta = (beta - alpha) / (2.0 * gamma)
                t = np.sign(zeta) / (abs(zeta) + np.hypot(zeta, 1.0)) if zeta != 0 else 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = c * t
                rot_p = c * u[:, p] - s * u[:, q]
                rot_q = s * u[:, p] + c * u[:, q]
                u[:, p], u[:, q] = rot_p, rot_q
                rot_p = c * v[:, p] - s * v[:, q]
                rot_q = s * v[:, p] + c * v[:, q]
                v[:, p], v[:, q] = rot_p, rot_q
        if not rotated:
            break
    sigma = np.linalg.norm(u, axis=0)
    order = np.argsort(sigma)[::-1]
    sigma = sigma[order]
    u = u[:, order]
    v = v[:, order]
    left = np.zeros_like(u)
    for j in range(n):
        if sigma[j] > tol * scale:
            left[:, j] = u[:, j] / sigma[j]
        else:
            left[:, j] = 0.0
    return left, sigma, v


def random_spd(n, rng, condition=1e3):
    """Random symmetric positive definite matrix with controlled conditioning."""
    q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    w = np.geomspace(1.0, 1.0 / condition, n)
    return (q * w[None, :]) @ q.T


def random_points_kernel(n, dim, rng, epsilon=None):
    """Gaussian kernel matrix of a random point cloud (unit diagonal, PSD)."""
    pts = rng.standard_normal((n, dim))
    sq = np.sum(pts**2, axis=1)
    d2 = np.maximum(sq[:, None] + sq[None, :] - 2.0 * pts @ pts.T, 0.0)
    if epsilon is None:
        epsilon = np.median(d2[np.triu_indices(n, 1)]) / dim
    k = np.exp(-d2 / (epsilon * dim))
    np.fill_diagonal(k, 1.0)
    return 0.5 * (k + k.T), pts


def max_subspace_angle(a, b):
    """Largest principal angle (radians) between the column spans of a and b."""
    qa, _ = np.linalg.qr(a)
    qb, _ = np.linalg.qr(b)
    s = np.linalg.svd(qa.T @ qb, compute_uv=False)
    return float(np.arccos(np.clip(s.min(), -1.0, 1.0)))
