"""High-dimensional sphericity tests with a Monte Carlo harness.

Six tests of the hypothesis that a covariance matrix is proportional to
the identity: sum-type, max-type, and adaptive Cauchy combinations, each
in a covariance-based and a spatial-sign-based flavor.
"""

from .datagen import (
    BlockSpiked,
    CovarianceModel,
    FAMILIES,
    NullIdentity,
    ScenarioSpec,
    derive_rep_seed,
    make_sigma,
    sample_scenario,
    sqrt_psd,
    validate_data,
)
from .errors import (
    ConvergenceError,
    DegenerateDataError,
    InvalidConfigError,
    InvalidInputError,
    KappaClampWarning,
    SphericityError,
)
from .estimators import (
    MomentSummary,
    SignSummary,
    moment_summary,
    sign_summary,
    spatial_median,
    spatial_sign,
)
from .kernels import backend_name
from .mc import (
    Campaign,
    IndependenceRecord,
    IndependenceReport,
    ReportRow,
    SimulationReport,
    estimate_size,
    independence_diagnostic,
    power_curve_sparsity,
    power_curve_strength,
)
from .tests import (
    TEST_NAMES,
    TestOutcome,
    cauchy_combine,
    gumbel_cdf,
    gumbel_quantile,
    run_suite,
    t_cn,
    t_cs,
    t_nm,
    t_ns,
    t_sm,
    t_ss,
)

__version__ = "1.0.0"

__all__ = [
    "BlockSpiked",
    "Campaign",
    "ConvergenceError",
    "CovarianceModel",
    "DegenerateDataError",
    "FAMILIES",
    "IndependenceRecord",
    "IndependenceReport",
    "InvalidConfigError",
    "InvalidInputError",
    "KappaClampWarning",
    "MomentSummary",
    "NullIdentity",
    "ReportRow",
    "ScenarioSpec",
    "SignSummary",
    "SimulationReport",
    "SphericityError",
    "TEST_NAMES",
    "TestOutcome",
    "backend_name",
    "cauchy_combine",
    "derive_rep_seed",
    "estimate_size",
    "gumbel_cdf",
    "gumbel_quantile",
    "independence_diagnostic",
    "make_sigma",
    "moment_summary",
    "power_curve_sparsity",
    "power_curve_strength",
    "run_suite",
    "sample_scenario",
    "sign_summary",
    "spatial_median",
    "spatial_sign",
    "sqrt_psd",
    "t_cn",
    "t_cs",
    "t_nm",
    "t_ns",
    "t_sm",
    "t_ss",
    "validate_data",
    "__version__",
]
