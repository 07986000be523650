"""Exception types shared across the package."""


class PGGError(Exception):
    """Base class for all errors raised by this package."""


class PatternSyntaxError(PGGError, ValueError):
    def __init__(self, text, position, message):
        self.text = text
        self.position = position
        super().__init__(f"{message} at position {position} in {text!r}")


class FormatError(PGGError, ValueError):
    """A malformed game, threshold, or 1-in-3 file."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class CapacityError(PGGError, RuntimeError):
    """An instance is too large for exhaustive enumeration."""


class NotDecreasingError(PGGError, ValueError):
    """An operation needs every pattern to be of the form 1^k 0*."""


class ReductionError(PGGError, ValueError):
    pass
