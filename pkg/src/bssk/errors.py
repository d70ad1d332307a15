"""Exception types shared across the package."""


class BsskError(Exception):
    """Base class for all package errors."""


class DimensionError(BsskError, ValueError):
    """Array shapes or matrix dimensions are invalid or inconsistent."""


class ParameterError(BsskError, ValueError):
    """A scalar parameter is outside its admissible range."""


class DomainError(BsskError, ValueError):
    """A transform was evaluated outside its domain of validity."""


class RegimeError(BsskError, ValueError):
    """An operation valid only in one temperature regime got the other one."""


class CriticalRegimeError(RegimeError):
    """The inverse temperature sits inside the critical band."""


class RareEventError(BsskError, RuntimeError):
    """A high-probability event failed for this disorder sample (z_c <= mu_1)."""


class SolverError(BsskError, RuntimeError):
    """An iterative solver failed to converge."""


class QuadratureError(BsskError, RuntimeError):
    """Numerical contour quadrature could not certify its result."""


class ExpansionError(BsskError, RuntimeError):
    """A saddle-point expansion is invalid (nonpositive discriminant)."""


class EvaluationError(BsskError, ValueError):
    """A user-supplied function returned a non-finite value."""


class ConfigError(BsskError, ValueError):
    """An experiment or CLI configuration is invalid."""
