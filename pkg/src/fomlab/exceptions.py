"""Exception types shared across the package."""


class FomlabError(Exception):
    """Base class for package errors."""


class ConvergenceError(FomlabError):
    """A series or iterative solver failed to reach the requested tolerance."""

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class ConfigurationError(FomlabError):
    """Inconsistent or incomplete model configuration."""


class ContactError(FomlabError):
    """A geometric gap closed to zero or below."""


class InsufficientDataError(FomlabError):
    """Not enough data points/realizations for the requested estimate."""
