"""Sample quantities consumed by the test statistics.

Two summaries cover everything the six tests need: moment-based
quantities from the ordinary sample covariance, and sign-based
quantities built from spatial signs around the spatial median.
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from . import kernels
from .datagen import validate_data
from .errors import ConvergenceError, DegenerateDataError, InvalidInputError

# Distances below 1e-12 times the data scale count as "at the median";
# such points get zero sign vectors and drop out of inverse-norm sums.
_COINCIDENCE_FACTOR = 1e-12


@dataclass(frozen=True)
class MomentSummary:
    """Means, covariances, and fourth-moment corrections.

    ``s`` uses the unbiased 1/(n-1) denominator, ``s_n`` uses 1/n; the
    diagonal of ``s_n`` is ``sigma2_hat`` exactly.  ``kappa_hat`` holds
    the per-column variance of the squared deviations (fourth central
    moment minus squared variance) and ``beta_hat`` the pooled excess
    kurtosis average.
    """

    col_means: np.ndarray
    sigma2_hat: np.ndarray
    kappa_hat: np.ndarray
    s: np.ndarray
    s_n: np.ndarray
    beta_hat: float


@dataclass(frozen=True)
class SignSummary:
    """Spatial median, spatial signs, sign covariance, inverse-norm means.

    ``signs`` rows are unit vectors (or exactly zero for observations at
    the median).  ``omega_hat`` is the average outer product of the sign
    rows.  ``c_hat = (c1, c2, c3)`` are means of the inverse distances to
    the median raised to powers 1..3, over the non-coincident rows.
    """

    theta_hat: np.ndarray
    signs: np.ndarray
    omega_hat: np.ndarray
    c_hat: Tuple[float, float, float]
    n_nonzero: int


def moment_summary(data) -> MomentSummary:
    """Compute all moment-based sample quantities in one pass.

    Every column must vary: a constant column makes the standardized
    fourth moments undefined and raises ``DegenerateDataError`` naming
    the column (1-based).  The moment-based tests additionally require
    n >= 3; that gate lives with the tests, not here.
    """
    x = validate_data(data)
    n, p = x.shape
    spread = x.max(axis=0) - x.min(axis=0)
    flat = np.flatnonzero(spread == 0.0)
    if flat.size:
        raise DegenerateDataError(
            f"column {flat[0] + 1} has zero variance (constant values)"
        )
    col_means = x.mean(axis=0)
    xc = x - col_means
    s_n = (xc.T @ xc) / n
    s = s_n * (n / (n - 1.0))
    sigma2 = np.diagonal(s_n).copy()
    if np.any(sigma2 == 0.0):
        j = int(np.flatnonzero(sigma2 == 0.0)[0])
        raise DegenerateDataError(f"column {j + 1} has zero variance")
    m4 = kernels.fourth_moments(xc)
    kappa = m4 - sigma2 * sigma2
    beta = float(np.mean(m4 / (sigma2 * sigma2)) - 3.0)
    return MomentSummary(
        col_means=col_means,
        sigma2_hat=sigma2,
        kappa_hat=kappa,
        s=s,
        s_n=s_n,
        beta_hat=beta,
    )


def spatial_median(data, tol: float = 1e-8, max_iter: int = 500) -> np.ndarray:
    """Point minimizing the sum of Euclidean distances to the rows.

    Weiszfeld iteration started at the coordinate-wise median, with the
    standard fix for iterates landing on a data point: the point's
    weight is dropped for the step and the subgradient optimality
    condition at the point is checked.  Convergence means the summed
    unit-vector gradient satisfies ``||g|| <= m + n * tol`` where ``m``
    counts coincident points.

    Raises ``ConvergenceError`` (carrying the last iterate and the
    per-observation gradient norm) if ``max_iter`` steps do not reach
    the tolerance.
    """
    x = validate_data(data)
    n = x.shape[0]
    start = np.median(x, axis=0)
    diff = x - start
    scale = float(np.sqrt(np.max(np.einsum("ij,ij->i", diff, diff))))
    if scale == 0.0:
        # Every observation equals the starting point; it is the minimizer.
        return start
    theta, gnorm, _, converged = kernels.weiszfeld(
        x, start, tol, max_iter, _COINCIDENCE_FACTOR * scale
    )
    if not converged:
        raise ConvergenceError(
            f"spatial median did not converge in {max_iter} iterations "
            f"(per-observation gradient norm {gnorm / n:.3e})",
            last_iterate=theta,
            gradient_norm=gnorm / n,
        )
    return theta


def spatial_sign(x) -> np.ndarray:
    """Unit vector in the direction of ``x``, or zero when ``x`` is zero."""
    v = np.asarray(x, dtype=np.float64)
    if v.ndim != 1:
        raise InvalidInputError(f"expected a vector, got ndim={v.ndim}")
    if not np.all(np.isfinite(v)):
        raise InvalidInputError("vector contains non-finite entries")
    norm = float(np.linalg.norm(v))
    if norm == 0.0:
        return np.zeros_like(v)
    return v / norm


def sign_summary(data) -> SignSummary:
    """Spatial signs around the spatial median plus derived quantities."""
    x = validate_data(data)
    n = x.shape[0]
    theta = spatial_median(x)
    diff = x - theta
    scale = float(np.sqrt(np.max(np.einsum("ij,ij->i", diff, diff))))
    eps = _COINCIDENCE_FACTOR * scale
    signs, s1, s2, s3, n_nonzero = kernels.signs_and_inverse_norms(diff, eps)
    if n_nonzero == 0:
        raise DegenerateDataError("all observations coincide with the spatial median")
    omega = (signs.T @ signs) / n
    c_hat = (s1 / n_nonzero, s2 / n_nonzero, s3 / n_nonzero)
    return SignSummary(
        theta_hat=theta,
        signs=signs,
        omega_hat=omega,
        c_hat=c_hat,
        n_nonzero=n_nonzero,
    )
