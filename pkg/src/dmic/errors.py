"""Exception hierarchy shared across the package."""


class DmicError(Exception):
    """Base class for all package errors."""


class ProbabilityError(DmicError, ValueError):
    """A table is not a valid (conditional) probability distribution."""


class PreconditionError(DmicError):
    """The channel does not belong to the class an operation requires.

    ``verdict`` carries whatever classification evidence was available when the
    check failed (a report, a bool, or ``None``).
    """

    def __init__(self, message, verdict=None):
        super().__init__(message)
        self.verdict = verdict


class MarkovViolationError(DmicError):
    def __init__(self, message, max_violation=float("nan")):
        super().__init__(message)
        self.max_violation = max_violation


class NonIdentifiableError(DmicError):
    """A linear system for a degradation table has no unique solution."""


class NumericError(DmicError, ArithmeticError):
    """An objective produced a non-finite value."""


class ChannelSpecError(DmicError, ValueError):
    """A channel file is malformed; ``location`` names the offending index."""

    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location
