"""Exception types raised by the engines."""


class RotorError(Exception):
    """Base class for numerical failures (CLI exit status 3)."""


class TruncationError(RotorError):
    """Population reached the edge of the truncated angular-momentum basis."""


class StepSizeError(RotorError):
    """Time step too coarse for the pulse or the coupling."""


class CausticProximity(RotorError):
    """A branch root sits (numerically) on a caustic, |dtheta/dtheta0| ~ 0."""


class FlatObjective(RotorError):
    """The factor does not vary over the search horizon."""


class MonotonicityViolation(RotorError):
    """Accumulative squeezing produced a non-decreasing factor."""


class NoFocus(RotorError):
    """The linearized trajectory never crosses zero in the window."""


class BudgetExhausted(RotorError):
    """Optimizer ran out of evaluations; ``result`` holds the best point found."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class ConfigError(ValueError):
    """Invalid experiment configuration (CLI exit status 2)."""
