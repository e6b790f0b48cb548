"""Exception hierarchy.

All failures raised by this package derive from CasimirLabError so callers can
catch everything with one except clause; subclasses also derive from the
closest builtin (ValueError, ArithmeticError) where that matches expectations.
"""


class CasimirLabError(Exception):
    """Base class for every error raised by casimirlab."""


class DomainError(CasimirLabError, ValueError):
    """Input outside the mathematical domain of an operation (e.g. xi = 0 in a Drude model)."""


class AccuracyError(CasimirLabError, ArithmeticError):
    """A quadrature or summation failed to converge within its budget."""


class ConfigError(CasimirLabError):
    """Malformed or incomplete configuration."""


class DataQualityError(CasimirLabError, ValueError):
    """Input data violates a quality requirement (gaps, ordering, negative values)."""


class UsageError(CasimirLabError):
    """Operation invoked with unusable arguments (empty inputs, missing files)."""


class FitError(CasimirLabError):
    """Fit failed to converge; carries the best result found so far."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class NoContactError(CasimirLabError, ValueError):
    """Load below the pull-off force: no contact solution exists."""


class GeometryError(CasimirLabError, ValueError):
    """Geometry kind unsupported by the requested operation."""


class ValidityError(CasimirLabError, ValueError):
    """Inputs are inside the math domain but outside the validity range of an expansion."""
