"""Exception types raised across the package."""


class PillRiskError(Exception):
    """Base class for every error raised by pillrisk."""


class NoSignChangeError(PillRiskError, ValueError):
    """The target function does not change sign on the bracket."""


class MaxIterationsError(PillRiskError, RuntimeError):
    """A root finder ran out of iterations before converging."""


class EmptyInputError(PillRiskError, ValueError):
    """A reduction received no term with positive weight."""


class DomainError(PillRiskError, ValueError):
    """An argument lies outside the domain of a utility function."""


class RangeError(PillRiskError, ValueError):
    """A utility value lies outside the range of its utility function."""


class NoSolutionError(PillRiskError, ArithmeticError):
    """A solver could not bracket a solution."""


class NoLimitError(PillRiskError, ValueError):
    """A step function has no two-sided limit at zero."""


class InvalidThresholdError(PillRiskError, ValueError):
    """The lambda threshold is undefined because the reward is not below life value."""


class InvalidEpsError(PillRiskError, ValueError):
    """A patch half-width reaches an existing breakpoint."""
