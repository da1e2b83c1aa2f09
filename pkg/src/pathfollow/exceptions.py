"""Exception types shared across the package."""


class PathfollowError(Exception):
    """Base class for all package errors."""


class DomainError(PathfollowError):
    """A point lies outside the domain of a loss function."""


class UnsupportedLossError(PathfollowError):
    """No smoothness profile is known for the requested loss family."""


class ConvergenceError(PathfollowError):
    """An inner optimizer hit its iteration cap before reaching tolerance."""


class NonterminationError(PathfollowError):
    """A path solver hit its outer iteration cap; signals a schedule bug.

    The partially built trace is attached as ``trace`` for post-mortems.
    """

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class NumericalError(PathfollowError):
    """A linear solve or factorization failed unexpectedly."""
