"""The six sphericity tests and their closed-form null calibrations.

Six procedures share two families of ingredients:

* covariance-based: a sum-type statistic from the trace of the squared
  normalized sample covariance (``NS``), a max-type statistic over
  standardized variance and covariance deviations (``NM``), and their
  Cauchy combination (``CN``);
* spatial-sign-based: the bias-corrected sum-type sign statistic
  (``SS``), a max-type statistic over sign-covariance deviations
  (``SM``), and their Cauchy combination (``CS``).

Sum-type statistics are standard normal under the null; max-type
statistics converge to the Gumbel-type law
``G(x) = exp(-exp(-x/2)/sqrt(pi))``.  All p-values are upper-tail.
"""

import math
import warnings
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from . import kernels
from .datagen import validate_data
from .errors import InvalidInputError, KappaClampWarning
from .estimators import MomentSummary, SignSummary, moment_summary, sign_summary

TEST_NAMES = ("NS", "NM", "SS", "SM", "CN", "CS")

_MOMENT_TESTS = frozenset({"NS", "NM", "CN"})
_SIGN_TESTS = frozenset({"SS", "SM", "CS"})
_SQRT_PI = math.sqrt(math.pi)
_SQRT_2 = math.sqrt(2.0)

# Relative floor applied to the fourth-moment variance before division.
_KAPPA_FLOOR = 1e-12


@dataclass(frozen=True)
class TestOutcome:
    """Result of one test: statistic, upper-tail p-value, decisions.

    For the combination tests CN and CS the combined p-value is itself
    the statistic, so ``statistic == p_value``.
    """

    name: str
    statistic: float
    p_value: float

    def reject_at(self, alpha: float) -> bool:
        """True when the test rejects at significance level ``alpha``."""
        if not 0.0 < alpha < 1.0:
            raise InvalidInputError(f"alpha must be in (0, 1), got {alpha}")
        return self.p_value <= alpha


def gumbel_cdf(x: float) -> float:
    """CDF of the max-type null law, ``exp(-exp(-x/2)/sqrt(pi))``."""
    x = float(x)
    if math.isnan(x):
        raise InvalidInputError("x must not be NaN")
    half = -x / 2.0
    if half > 700.0:
        return 0.0
    return math.exp(-math.exp(half) / _SQRT_PI)


def _gumbel_sf(x: float) -> float:
    """Upper tail 1 - G(x), accurate for large x."""
    half = -x / 2.0
    if half > 700.0:
        return 1.0
    return -math.expm1(-math.exp(half) / _SQRT_PI)


def gumbel_quantile(alpha: float) -> float:
    """Upper-alpha critical value: G(q) = 1 - alpha.

    Closed form ``-log(pi) - 2 log log 1/(1-alpha)``.
    """
    if not 0.0 < alpha < 1.0:
        raise InvalidInputError(f"alpha must be in (0, 1), got {alpha}")
    return -math.log(math.pi) - 2.0 * math.log(math.log(1.0 / (1.0 - alpha)))


def _norm_sf(x: float) -> float:
    """Upper tail of the standard normal via the complementary error function."""
    return 0.5 * math.erfc(x / _SQRT_2)


def _cauchy_sf(x: float) -> float:
    """Upper tail of the standard Cauchy, stable for large x."""
    if x > 0.0:
        return math.atan2(1.0, x) / math.pi
    return 0.5 - math.atan(x) / math.pi


def cauchy_combine(p1: float, p2: float) -> float:
    """Combine two p-values through the truncated Cauchy transform.

    Each p-value below one half contributes ``0.5 tan((0.5 - p) pi)``;
    larger p-values are truncated to a zero contribution.  The combined
    p-value is the standard Cauchy upper tail of the sum.  An input of
    exactly zero short-circuits to zero (the tangent singularity).
    """
    combined = 0.0
    for p in (p1, p2):
        p = float(p)
        if not 0.0 <= p <= 1.0 or math.isnan(p):
            raise InvalidInputError(f"p-values must lie in [0, 1], got {p}")
        if p == 0.0:
            return 0.0
        if p < 0.5:
            # 0.5 * tan((0.5 - p) * pi) == 0.5 / tan(pi * p), the stable form.
            combined += 0.5 / math.tan(math.pi * p)
    return _cauchy_sf(combined)


def _max_correction(p: int) -> float:
    """Recentering constant for the max-type statistics."""
    pairs = p * (p + 1) / 2.0
    return -2.0 * math.log(pairs) + math.log(math.log(pairs))


def _require_n(n: int, minimum: int, what: str):
    if n < minimum:
        raise InvalidInputError(f"{what} requires n >= {minimum}, got n = {n}")


def _outcome_ns(ms: MomentSummary, n: int, p: int) -> TestOutcome:
    trace = float(np.trace(ms.s))
    trace_sq = float(np.sum(ms.s * ms.s))
    # (n-1)/(np) * (n p^2 / 2) * tr{(S/tr S) - I/p}^2, expanded.
    stat = 0.5 * (n - 1.0) * p * (trace_sq / trace**2 - 1.0 / p)
    stat -= 0.5 * (p + ms.beta_hat + 1.0)
    return TestOutcome("NS", stat, _norm_sf(stat))


def _outcome_nm(ms: MomentSummary, n: int, p: int) -> TestOutcome:
    sigma2 = ms.sigma2_hat
    floor = _KAPPA_FLOOR * sigma2 * sigma2
    if np.any(ms.kappa_hat < floor):
        warnings.warn(
            "fourth-moment variance estimate floored before division; "
            "the max-type covariance statistic may be unstable",
            KappaClampWarning,
            stacklevel=3,
        )
    kappa = np.maximum(ms.kappa_hat, floor)
    trace_over_p = float(np.trace(ms.s_n)) / p
    peak = kernels.max_cov_terms(ms.s_n, sigma2, kappa, trace_over_p, n)
    stat = peak + _max_correction(p)
    return TestOutcome("NM", stat, _gumbel_sf(stat))


def _outcome_ss(sg: SignSummary, n: int, p: int) -> TestOutcome:
    # Sum of squared sign inner products over ordered pairs i != j, via
    # the Gram identity n^2 ||Omega||_F^2 = sum_{i,j} (U_i . U_j)^2.
    row_sq = np.einsum("ij,ij->i", sg.signs, sg.signs)
    total = float(n * n * np.sum(sg.omega_hat * sg.omega_hat))
    off_pairs = total - float(np.sum(row_sq * row_sq))
    q_tilde = p / (n * (n - 1.0)) * off_pairs - 1.0
    c1, c2, c3 = sg.c_hat
    r2 = c2 / c1**2
    delta_hat = (2.0 - 2.0 * r2 + r2 * r2) / n**2
    delta_hat += (
        8.0 * r2 - 6.0 * r2 * r2 + 2.0 * c2 * c3 / c1**5 - 2.0 * c3 / c1**3
    ) / n**3
    sigma_s = math.sqrt(4.0 * (p - 1.0) / (n * (n - 1.0) * (p + 2.0)))
    stat = (q_tilde - p * delta_hat) / sigma_s
    return TestOutcome("SS", stat, _norm_sf(stat))


def _outcome_sm(sg: SignSummary, n: int, p: int) -> TestOutcome:
    peak = kernels.max_sign_terms(sg.omega_hat, n)
    stat = peak + _max_correction(p)
    return TestOutcome("SM", stat, _gumbel_sf(stat))


def _combine(name: str, first: TestOutcome, second: TestOutcome) -> TestOutcome:
    combined = cauchy_combine(first.p_value, second.p_value)
    return TestOutcome(name, combined, combined)


def run_suite(data, tests: Optional[Sequence[str]] = None) -> Dict[str, TestOutcome]:
    """Run several tests on one dataset, sharing the sample summaries.

    ``tests`` selects a subset of ``TEST_NAMES``; the default runs all
    six.  Returns outcomes keyed by test name, in canonical order.
    Combination tests imply their two components internally even when
    the components are not requested.
    """
    x = validate_data(data)
    n, p = x.shape
    if tests is None:
        requested: Tuple[str, ...] = TEST_NAMES
    else:
        requested = tuple(tests)
        unknown = [t for t in requested if t not in TEST_NAMES]
        if unknown:
            raise InvalidInputError(
                f"unknown tests {unknown}; valid names are {list(TEST_NAMES)}"
            )
        if not requested:
            raise InvalidInputError("at least one test must be requested")
    if set(requested) != {"SM"}:
        _require_n(n, 3, "this test selection")
    outcomes: Dict[str, TestOutcome] = {}
    if _MOMENT_TESTS & set(requested):
        ms = moment_summary(x)
        outcomes["NS"] = _outcome_ns(ms, n, p)
        outcomes["NM"] = _outcome_nm(ms, n, p)
        if "CN" in requested:
            outcomes["CN"] = _combine("CN", outcomes["NS"], outcomes["NM"])
    if _SIGN_TESTS & set(requested):
        sg = sign_summary(x)
        outcomes["SS"] = _outcome_ss(sg, n, p)
        outcomes["SM"] = _outcome_sm(sg, n, p)
        if "CS" in requested:
            outcomes["CS"] = _combine("CS", outcomes["SS"], outcomes["SM"])
    return {name: outcomes[name] for name in TEST_NAMES if name in requested}


def t_ns(data) -> TestOutcome:
    """Sum-type test from the normalized sample covariance trace."""
    x = validate_data(data)
    _require_n(x.shape[0], 3, "the covariance sum-type test")
    return _outcome_ns(moment_summary(x), *x.shape)


def t_nm(data) -> TestOutcome:
    """Max-type test over standardized covariance deviations."""
    x = validate_data(data)
    _require_n(x.shape[0], 3, "the covariance max-type test")
    return _outcome_nm(moment_summary(x), *x.shape)


def t_ss(data) -> TestOutcome:
    """Bias-corrected sum-type test from spatial-sign inner products."""
    x = validate_data(data)
    _require_n(x.shape[0], 3, "the sign sum-type test")
    return _outcome_ss(sign_summary(x), *x.shape)


def t_sm(data) -> TestOutcome:
    """Max-type test over sign-covariance deviations."""
    x = validate_data(data)
    return _outcome_sm(sign_summary(x), *x.shape)


def t_cn(data) -> TestOutcome:
    """Cauchy combination of the two covariance-based tests."""
    return run_suite(data, tests=("CN",))["CN"]


def t_cs(data) -> TestOutcome:
    """Cauchy combination of the two sign-based tests."""
    return run_suite(data, tests=("CS",))["CS"]
