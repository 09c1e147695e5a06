"""Exception types shared across the package."""


class GPTemperError(Exception):
    """Base class for all package errors."""


class ColumnError(GPTemperError):
    """A named column is missing or unusable."""


class ParseError(GPTemperError):
    """A cell in the input file failed to parse as a finite real."""


class InsufficientDataError(GPTemperError):
    """Fewer than two training points after splitting."""


class DegenerateColumnError(GPTemperError):
    """An input column has zero variance and cannot be normalized."""


class NotPositiveDefiniteError(GPTemperError):
    """Covariance factorization failed even at maximum jitter."""


class DegeneratePopulationError(GPTemperError):
    """Every particle weight collapsed to zero."""
