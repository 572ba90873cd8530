"""Exception hierarchy shared by all moment-lab modules."""


class MomentLabError(Exception):
    """Base class for every error raised by this package."""


class DomainError(MomentLabError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class PoleError(DomainError):
    """Evaluation requested at (or numerically on top of) a pole."""


class RangeError(DomainError):
    """Argument outside the supported continuation / parameter range."""


class ParityError(DomainError):
    """An even (or odd) integer was required."""


class StripError(DomainError):
    """Mellin exponent outside the convergence strip of a kernel integral."""


class CoprimalityError(DomainError):
    """gcd constraint violated (e.g. the twist d/c needs gcd(d, c) = 1)."""


class EndpointError(DomainError):
    """Evaluation point too close to an interval endpoint."""


class RegimeError(DomainError):
    """Asymptotic evaluator called outside its validity regime."""


class ConvergenceError(MomentLabError, RuntimeError):
    """A series or iteration failed to reach the requested tolerance."""

    def __init__(self, message, slow_convergence=False):
        super().__init__(message)
        self.slow_convergence = slow_convergence


class TruncationError(ConvergenceError):
    """A certified truncation bound could not be pushed below target."""


class IllConditionedError(MomentLabError, RuntimeError):
    """Linear solve rejected: condition number above the safety threshold."""


class EigenvalueCollisionError(MomentLabError, RuntimeError):
    """Hecke operator spectrum not simple even after the tiebreak."""


class EmptySupportError(DomainError):
    """Averaging window contains too few admissible weights."""


class CapExceededError(DomainError):
    """Configuration exceeds a hard feasibility cap."""


class IntegerLengthError(DomainError):
    """Mollifier length M must not be an integer."""


class InsufficientPointsError(DomainError):
    """A fit was requested with fewer points than the model needs."""
