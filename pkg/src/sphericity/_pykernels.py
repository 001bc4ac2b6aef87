"""Pure NumPy implementations of the hot per-replication kernels.

These mirror the compiled kernels in ``_ckernels`` one to one; the
dispatcher in :mod:`sphericity.kernels` picks whichever is available.
Dense linear algebra (covariance and sign-covariance products) stays in
BLAS either way and is not part of this surface.
"""

import numpy as np

BACKEND = "python"


def weiszfeld(x, start, tol, max_iter, coincide_eps):
    """Weiszfeld iteration for the Euclidean spatial median.

    Iterates are checked against the subgradient optimality condition:
    with ``m`` points within ``coincide_eps`` of the current iterate and
    ``g`` the sum of unit vectors toward the remaining points, the
    iterate is optimal once ``||g|| <= m + n * tol``.  Coincident points
    drop out of the update step (standard singularity fix).

    Returns ``(theta, gradient_norm, iterations, converged)`` where
    ``gradient_norm`` is the unnormalized ``||g||`` at the final iterate.
    """
    x = np.ascontiguousarray(x, dtype=np.float64)
    n = x.shape[0]
    theta = np.array(start, dtype=np.float64, copy=True)
    gnorm = np.inf
    for iteration in range(max_iter + 1):
        diff = x - theta
        dist = np.sqrt(np.einsum("ij,ij->i", diff, diff))
        far = dist > coincide_eps
        m = n - int(np.count_nonzero(far))
        inv = np.zeros(n)
        inv[far] = 1.0 / dist[far]
        gsum = inv @ diff
        gnorm = float(np.sqrt(gsum @ gsum))
        if gnorm <= m + n * tol:
            return theta, gnorm, iteration, True
        if iteration == max_iter:
            break
        theta = (inv @ x) / inv.sum()
    return theta, gnorm, max_iter, False


def fourth_moments(xc):
    """Column means of the fourth power of already-centered data."""
    xc = np.asarray(xc)
    sq = xc * xc
    return np.mean(sq * sq, axis=0)


def signs_and_inverse_norms(diff, coincide_eps):
    """Spatial signs of centered rows plus inverse-norm power sums.

    Rows with norm at most ``coincide_eps`` become zero sign vectors and
    are left out of the sums.  Returns
    ``(signs, sum_inv, sum_inv2, sum_inv3, n_nonzero)``.
    """
    diff = np.ascontiguousarray(diff, dtype=np.float64)
    dist = np.sqrt(np.einsum("ij,ij->i", diff, diff))
    far = dist > coincide_eps
    inv = np.zeros(diff.shape[0])
    inv[far] = 1.0 / dist[far]
    signs = diff * inv[:, None]
    inv_nz = inv[far]
    s1 = float(inv_nz.sum())
    s2 = float((inv_nz * inv_nz).sum())
    s3 = float((inv_nz * inv_nz * inv_nz).sum())
    return signs, s1, s2, s3, int(np.count_nonzero(far))


def max_cov_terms(s_n, sigma2, kappa, trace_over_p, n):
    """Largest standardized deviation over the covariance entries.

    Diagonal candidates are ``n * (sigma2_k - trace_over_p)^2 / kappa_k``;
    off-diagonal candidates are ``n * s_n[i,j]^2 / (sigma2_i * sigma2_j)``
    over ``i < j``.  ``kappa`` must already be floored away from zero.
    """
    s_n = np.asarray(s_n)
    sigma2 = np.asarray(sigma2)
    diag_max = float(np.max(n * (sigma2 - trace_over_p) ** 2 / kappa))
    ratio = s_n * s_n / (sigma2[:, None] * sigma2[None, :])
    iu = np.triu_indices(s_n.shape[0], k=1)
    off_max = float(n * np.max(ratio[iu]))
    return max(diag_max, off_max)


def max_sign_terms(omega, n):
    """Largest standardized deviation of the sign covariance from p^-1 I.

    Diagonal candidates are ``n p (p+2) (omega_ii - 1/p)^2 / (2 (1-1/p))``;
    off-diagonal candidates are ``n p (p+2) omega_ij^2`` over ``i < j``.
    """
    omega = np.asarray(omega)
    p = omega.shape[0]
    scale = n * p * (p + 2.0)
    psi_ii = np.diagonal(omega)
    diag_max = float(np.max(scale * (psi_ii - 1.0 / p) ** 2 / (2.0 * (1.0 - 1.0 / p))))
    iu = np.triu_indices(p, k=1)
    off_max = float(scale * np.max(omega[iu] ** 2))
    return max(diag_max, off_max)
