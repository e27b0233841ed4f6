"""Exception hierarchy shared by all modules."""


class CorrspecError(Exception):
    """Base class for every error raised by corrspec."""


class DimensionError(CorrspecError, ValueError):
    """Input is not square or is smaller than 2x2."""


class DomainError(CorrspecError, ValueError):
    """Scalar argument outside the domain of a function."""


class InvalidCorrelationError(CorrspecError, ValueError):
    """Matrix failed correlation-matrix validation; ``report`` lists why."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class NotPSDError(InvalidCorrelationError):
    """A matrix (or a parameter that defines one) is not positive semi-definite."""


class DegenerateInputError(CorrspecError, ValueError):
    pass


class ExcludedInputError(CorrspecError, ValueError):
    """The identity characteristic (c, sigma) = (0, 0) where bounds are undefined."""


class UnsupportedInputError(CorrspecError, ValueError):
    """A bound only defined for positive mean correlation was given c <= 0."""


class PreconditionError(CorrspecError, ValueError):
    pass


class EigenSolverError(CorrspecError, ArithmeticError):
    pass


class MatrixParseError(CorrspecError, ValueError):
    """A matrix or recipe file could not be parsed."""
