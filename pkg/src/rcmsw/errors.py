"""Exception hierarchy shared by all modules."""


class RCMError(Exception):
    """Base class for errors raised by rcmsw."""


class InvalidArgumentError(RCMError, ValueError):
    """An argument violates a documented precondition."""


class DataError(RCMError, ValueError):
    """Observations are malformed (zero-norm rows, non-finite values, ...)."""

    def __init__(self, message, row=None):
        super().__init__(message)
        self.row = row


class ParseError(DataError):
    """A CSV file could not be parsed."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ConditioningError(RCMError, ArithmeticError):
    """A linear system is singular or too ill-conditioned to solve."""
