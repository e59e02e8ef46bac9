"""Exception hierarchy shared by all modules."""


class HolderError(ValueError):
    """Base class for every error raised by holderexp."""


class OriginError(HolderError):
    """A polar (0-homogeneous) quantity was requested at the origin."""


class DomainError(HolderError):
    """A point lies outside the declared domain of a field."""


class InvalidFieldError(HolderError):
    """A coefficient value failed positive definiteness."""


class PreconditionError(HolderError):
    """An operation was called outside its documented range of validity."""


class QuadratureError(HolderError):
    """Adaptive quadrature failed to reach the requested tolerance."""

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class ConvergenceError(HolderError):
    """An iterative eigen-solver did not converge."""


class EmptyScanError(HolderError):
    """A circle scan produced no admissible circle."""


class ParseError(HolderError):
    """Malformed field or weight file. Carries the offending line number."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
