"""Exception types shared across the package."""


class SphericityError(Exception):
    """Base class for all errors raised by this package."""


class InvalidConfigError(SphericityError, ValueError):
    """A scenario, covariance model, or campaign is inconsistent."""


class InvalidInputError(SphericityError, ValueError):
    """An input array or scalar violates a documented precondition."""


class DegenerateDataError(SphericityError, ValueError):
    """The data carry no usable variation (e.g. a constant column)."""


class ConvergenceError(SphericityError, RuntimeError):
    """An iterative solver did not reach its tolerance.

    Carries the last iterate and the gradient norm at that iterate so
    callers can inspect how close the solver got.
    """

    def __init__(self, message, last_iterate=None, gradient_norm=None):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.gradient_norm = gradient_norm


class KappaClampWarning(UserWarning):
    """A fourth-moment variance estimate was floored before division."""
