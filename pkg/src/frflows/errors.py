"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """Raised for non-finite samples, mismatched grids or malformed arguments."""


class DomainError(ValueError):
    """Raised when an operator is applied outside its domain of definition."""


class DegenerateDiffeoError(ValueError):
    """Raised when a map fails to be an orientation-preserving diffeomorphism."""


class BreakdownError(RuntimeError):
    """Raised when a flow or geodesic ceases to exist as a smooth solution.

    The attribute ``time`` carries the first time at which the breakdown was
    detected (or predicted).
    """

    def __init__(self, message, time):
        super().__init__(message)
        self.time = float(time)
