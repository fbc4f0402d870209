"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of a function."""


class ConvergenceError(RuntimeError):
    """An iterative or series evaluation failed to reach its tolerance."""


class SeriesDivergenceError(ConvergenceError):
    """A truncated series did not settle within its term budget.

    The partial sum reached before giving up is kept on the exception so
    callers can report it alongside the failure.
    """

    def __init__(self, message, partial_sum=float("nan"), terms=0):
        super().__init__(message)
        self.partial_sum = partial_sum
        self.terms = terms
