"""Exception types raised across the package."""


class DimensionError(ValueError):
    """Array shapes or sizes are inconsistent or empty."""


class ParameterError(ValueError):
    """A scalar parameter lies outside its admissible range."""


class DomainError(ArithmeticError):
    """A function was evaluated at or beyond a singularity."""


class AccuracyError(ArithmeticError):
    """Adaptive refinement stopped before reaching the requested tolerance.

    The best available estimate is kept on ``estimate`` so callers can
    still inspect it.
    """

    def __init__(self, message, estimate):
        super().__init__(message)
        self.estimate = estimate
