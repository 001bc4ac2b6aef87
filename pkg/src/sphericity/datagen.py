"""Synthetic data generation for sphericity experiments.

Four distribution families are supported, all standardized so the rows
have mean zero and population covariance exactly equal to the requested
matrix:

``normal``
    Multivariate normal.
``t3``
    Multivariate t with 3 degrees of freedom, divided by sqrt(3).  Since
    E[1/chi2_3] = 1 the rescaled draw has covariance equal to the scatter
    matrix exactly.
``mixture``
    0.8 N(0, Sigma) + 0.2 N(0, 9 Sigma), divided by sqrt(2.6).
``gamma``
    Independent component model Sigma^{1/2} Z with Z entries i.i.d.
    Gamma(shape 4, rate 2) - 2, which has mean 0 and variance 1.

Sampling is a pure function of ``(spec, rep_index)``: every replication
gets its own counter-based generator keyed by an avalanche mix of the
master seed and the replication index, so serial and parallel runs see
identical streams.
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Union

import numpy as np

from .errors import InvalidConfigError, InvalidInputError

FAMILIES = ("normal", "t3", "mixture", "gamma")

MIXTURE_WEIGHT = 0.8
MIXTURE_VARIANCE_RATIO = 9.0
# Variance of the unstandardized mixture draw; dividing by its square root
# restores unit scale.
_MIXTURE_NORMALIZER = math.sqrt(
    MIXTURE_WEIGHT + MIXTURE_VARIANCE_RATIO * (1.0 - MIXTURE_WEIGHT)
)

_SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class NullIdentity:
    """Scalar-identity covariance ``sigma2 * I_p`` (the null model)."""

    sigma2: float = 1.0

    def __post_init__(self):
        if not (self.sigma2 > 0.0 and math.isfinite(self.sigma2)):
            raise InvalidConfigError(f"sigma2 must be positive, got {self.sigma2}")

    def label(self) -> str:
        return f"null(sigma2={self.sigma2:g})"


@dataclass(frozen=True)
class BlockSpiked:
    """Block-equicorrelated alternative ``diag{A_s, I_(p-s)}``.

    The leading ``s x s`` block is ``(1 - delta) I_s + delta 11^T`` with
    ``delta = a / sqrt(s)``.  ``a = 0`` is allowed and collapses to the
    identity, which signal-strength grids rely on.
    """

    s: int
    a: float

    def __post_init__(self):
        if self.s < 1:
            raise InvalidConfigError(f"block size s must be >= 1, got {self.s}")
        if not (self.a >= 0.0 and math.isfinite(self.a)):
            raise InvalidConfigError(f"signal strength a must be >= 0, got {self.a}")

    @property
    def delta(self) -> float:
        return self.a / math.sqrt(self.s)

    def label(self) -> str:
        return f"spiked(s={self.s},a={self.a:g})"


CovarianceModel = Union[NullIdentity, BlockSpiked]


@dataclass(frozen=True)
class ScenarioSpec:
    """Distribution family, dimensions, covariance model, and master seed."""

    family: str
    n: int
    p: int
    cov: CovarianceModel
    master_seed: int

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidConfigError(
                f"unknown family {self.family!r}; expected one of {FAMILIES}"
            )
        if self.n < 2 or self.p < 2:
            raise InvalidConfigError(
                f"need n >= 2 and p >= 2, got n={self.n}, p={self.p}"
            )
        if not 0 <= self.master_seed <= _SEED_MASK:
            raise InvalidConfigError("master_seed must fit in 64 unsigned bits")


def make_sigma(cov: CovarianceModel, p: int) -> np.ndarray:
    """Realize a covariance model as an exact p x p matrix.

    Raises ``InvalidConfigError`` when the block does not fit (``s > p``)
    or the equicorrelation would not be positive definite (``delta >= 1``).
    """
    if p < 2:
        raise InvalidConfigError(f"dimension p must be >= 2, got {p}")
    if isinstance(cov, NullIdentity):
        return cov.sigma2 * np.eye(p)
    if cov.s > p:
        raise InvalidConfigError(f"block size s={cov.s} exceeds dimension p={p}")
    delta = cov.delta
    if delta >= 1.0:
        raise InvalidConfigError(
            f"delta = a/sqrt(s) = {delta:g} must be below 1 for positive definiteness"
        )
    sigma = np.eye(p)
    block = np.full((cov.s, cov.s), delta)
    np.fill_diagonal(block, 1.0)
    sigma[: cov.s, : cov.s] = block
    return sigma


def sqrt_psd(m) -> np.ndarray:
    """Symmetric square root of a symmetric PSD matrix.

    Uses an eigendecomposition and clamps slightly negative eigenvalues
    (down to -1e-10 times the largest) at zero, so PSD inputs that are
    not strictly PD are accepted.
    """
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidInputError(f"expected a square matrix, got shape {m.shape}")
    if not np.allclose(m, m.T, rtol=1e-10, atol=1e-12):
        raise InvalidInputError("matrix is not symmetric")
    eigvals, eigvecs = np.linalg.eigh(m)
    top = max(float(eigvals[-1]), 0.0)
    if eigvals[0] < -1e-10 * top:
        raise InvalidInputError("matrix is not positive semidefinite")
    root = (eigvecs * np.sqrt(np.clip(eigvals, 0.0, None))) @ eigvecs.T
    return (root + root.T) / 2.0


def _avalanche(z: int) -> int:
    """64-bit finalizer mix (SplitMix64 style): full avalanche, bijective."""
    z &= _SEED_MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _SEED_MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _SEED_MASK
    return z ^ (z >> 31)


def derive_rep_seed(master_seed: int, rep_index: int) -> int:
    """Deterministic 64-bit seed for one replication.

    Mixes the pair through two avalanche rounds so nearby inputs map to
    unrelated outputs; identical inputs always give identical outputs.
    """
    if rep_index < 0:
        raise InvalidConfigError(f"rep_index must be >= 0, got {rep_index}")
    h = _avalanche((master_seed + 0x9E3779B97F4A7C15) & _SEED_MASK)
    h = _avalanche(h ^ ((rep_index + 0xD1B54A32D192ED03) & _SEED_MASK))
    return h


@lru_cache(maxsize=64)
def _sigma_root(cov: CovarianceModel, p: int):
    """Square root of the realized covariance, cached per (model, p).

    Returns a scalar for isotropic models so samplers can skip the
    matrix product (and stay bit-identical to the raw innovations when
    the factor is 1).
    """
    if isinstance(cov, NullIdentity):
        return math.sqrt(cov.sigma2)
    if cov.a == 0.0:
        if cov.s > p:
            raise InvalidConfigError(f"block size s={cov.s} exceeds dimension p={p}")
        return 1.0
    return sqrt_psd(make_sigma(cov, p))


def _standardized_innovations(rng: np.random.Generator, family: str, n: int, p: int):
    """Draw an n x p matrix with mean 0 and identity covariance.

    The draw order per family is fixed and documented here; changing it
    would silently invalidate every recorded seed.
    """
    if family == "normal":
        return rng.standard_normal((n, p))
    if family == "t3":
        g = rng.standard_normal((n, p))
        chi2 = rng.chisquare(3.0, n)
        # t3 / sqrt(3) = g / sqrt(chi2); E[1/chi2_3] = 1 gives unit covariance.
        return g / np.sqrt(chi2)[:, None]
    if family == "mixture":
        g = rng.standard_normal((n, p))
        wide = rng.random(n) >= MIXTURE_WEIGHT
        scale = np.where(wide, math.sqrt(MIXTURE_VARIANCE_RATIO), 1.0)
        return g * (scale / _MIXTURE_NORMALIZER)[:, None]
    if family == "gamma":
        # shape 4, rate 2 (scale 1/2): mean 2, variance 1.
        return rng.gamma(4.0, 0.5, (n, p)) - 2.0
    raise InvalidConfigError(f"unknown family {family!r}")


def sample_scenario(spec: ScenarioSpec, rep_index: int) -> np.ndarray:
    """Generate the dataset for one replication of a scenario.

    Rows are i.i.d. draws with mean 0 and population covariance exactly
    ``make_sigma(spec.cov, spec.p)``.  Output is a pure function of
    ``(spec, rep_index)``.
    """
    rng = np.random.Generator(
        np.random.Philox(key=derive_rep_seed(spec.master_seed, rep_index))
    )
    z = _standardized_innovations(rng, spec.family, spec.n, spec.p)
    root = _sigma_root(spec.cov, spec.p)
    if isinstance(root, float):
        return z if root == 1.0 else z * root
    return z @ root


def validate_data(data) -> np.ndarray:
    """Coerce to a C-contiguous float64 n x p matrix and check the contract."""
    arr = np.ascontiguousarray(data, dtype=np.float64)
    if arr.ndim != 2:
        raise InvalidInputError(f"data must be 2-D, got ndim={arr.ndim}")
    n, p = arr.shape
    if n < 2 or p < 2:
        raise InvalidInputError(f"data must be at least 2 x 2, got {n} x {p}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("data contains non-finite entries")
    return arr
