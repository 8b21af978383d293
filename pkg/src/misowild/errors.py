"""Exception types raised across the package."""


class IllConditioned(RuntimeError):
    """Covariance factorization failed even at the largest jitter."""


class NonpositiveCost(ValueError):
    """A source reported a query cost that is not strictly positive."""


class SourceUnavailable(RuntimeError):
    """An information source refused or failed to answer a query."""


class ConfigError(ValueError):
    """Invalid experiment configuration.

    ``field`` names the offending configuration key when known.
    """

    def __init__(self, message, field=None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)


class RunAborted(RuntimeError):
    """A run stopped on a failure; ``history`` holds every record logged so far."""

    def __init__(self, message, history):
        super().__init__(message)
        self.history = history
