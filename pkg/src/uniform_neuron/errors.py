"""Exception hierarchy shared by all modules."""


class UniformFitError(Exception):
    """Base class for every error raised by this package."""


class DimensionMismatch(UniformFitError, ValueError):
    pass


class MalformedSystem(UniformFitError, ValueError):
    pass


class KindNotSmooth(UniformFitError, TypeError):
    pass


class NumericFailure(UniformFitError, ArithmeticError):
    """The simplex solver cycled, stalled or hit its iteration cap."""


class RangeInfeasible(UniformFitError):
    """A target cannot be reached by the activation even with the given slack."""

    def __init__(self, index, message):
        super().__init__(message)
        self.index = index


class ZeroDeviation(UniformFitError):
    """Certificates are undefined when the maximal deviation is (numerically) zero."""


class EnumerationCapExceeded(UniformFitError):
    pass


class DatasetError(UniformFitError, ValueError):
    """Raised on unparseable input files; ``line`` is 1-based when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
