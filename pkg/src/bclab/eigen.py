"""Small dense symmetric eigensolvers.

The generalized problem ``h v = k g v`` with ``g`` SPD is reduced by a
Cholesky factor ``g = L L^T`` to ``C y = k y`` with ``C = L^-1 h L^-T`` and
solved by cyclic Jacobi rotations.  Sizes here never exceed 8x8, where
Jacobi is accurate to a few ulps and needs no tuning.
"""

import numpy as np
from scipy.linalg import solve_triangular

from .errors import Degenerate


def jacobi_eigh(a, tol=1e-15, max_sweeps=60):
    """Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.

    Parameters
    ----------
    a : (n, n) array_like
        Symmetric matrix.  Only its symmetric part is used.
    tol : float
        Sweeps stop once the off-diagonal Frobenius norm falls below
        ``tol * ||a||_F``.
    max_sweeps : int
        Hard cap on the number of full sweeps.

    Returns
    -------
    w : (n,) ndarray
        Eigenvalues (unsorted, in rotation order).
    v : (n, n) ndarray
        Orthonormal eigenvectors as columns.
    """
    a = np.array(a, dtype=float)
    a = 0.5 * (a + a.T)
    n = a.shape[0]
    v = np.eye(n)
    scale = np.linalg.norm(a)
    if scale == 0.0:
        return np.zeros(n), v
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.tril(a, -1) ** 2) * 2.0)
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) < 1e-300:
                    continue
                # Rutishauser's stable form of the rotation angle
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta == 0.0:
                    t = 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rot_p = a[:, p].copy()
                rot_q = a[:, q].copy()
                a[:, p] = c * rot_p - s * rot_q
                a[:, q] = s * rot_p + c * rot_q
                rot_p = a[p, :].copy()
                rot_q = a[q, :].copy()
                a[p, :] = c * rot_p - s * rot_q
                a[q, :] = s * rot_p + c * rot_q
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    return np.diag(a).copy(), v


def cholesky(g):
    try:
        return np.linalg.cholesky(g)
    except np.linalg.LinAlgError as exc:
        raise Degenerate("metric is not positive definite") from exc


def generalized_eigh(h, g):
    """Solve ``h v = k g v`` for symmetric ``h`` and SPD ``g``.

    Returns eigenvalues sorted descending and the matching eigenvectors as
    columns, normalized so that ``V^T g V = I``.
    """
    L = cholesky(g)
    x = solve_triangular(L, h, lower=True)
    c = solve_triangular(L, x.T, lower=True)
    w, y = jacobi_eigh(c)
    v = solve_triangular(L.T, y, lower=False)
    order = np.argsort(-w, kind="stable")
    return w[order], v[:, order]
