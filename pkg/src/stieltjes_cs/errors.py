"""Exception hierarchy shared by the numerical modules and the CLI."""


class StieltjesError(Exception):
    """Base class for all package errors."""


class DomainError(StieltjesError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConfigError(StieltjesError, ValueError):
    """A tolerance, node budget or run option is invalid."""


class DegenerateCaseError(StieltjesError, ValueError):
    """The undeformed case q = 1 was passed to a q > 1 integral representation.

    Use the closed form ``exp(-t)`` for the weight at q = 1.
    """


class AccuracyError(StieltjesError, ArithmeticError):
    """A quadrature did not reach its tolerance.

    Attributes
    ----------
    estimates : tuple of float
        The last two estimates produced before giving up.
    where : dict
        The offending argument (``{"t": ...}`` or ``{"n": ...}``).
    """

    def __init__(self, message, estimates=(), where=None):
        super().__init__(message)
        self.estimates = tuple(estimates)
        self.where = dict(where or {})


class RangeError(StieltjesError, OverflowError):
    """A requested order or truncation exceeds the configured bound."""

    def __init__(self, message, where=None):
        super().__init__(message)
        self.where = dict(where or {})


class DimensionError(StieltjesError, ValueError):
    """Operator and state dimensions are incompatible."""
