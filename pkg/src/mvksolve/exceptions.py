"""Exception hierarchy shared across the package."""


class MvkError(Exception):
    """Base class for all package errors."""


class ConfigError(MvkError):
    """Invalid or inconsistent configuration / problem description.

    ``field`` carries a dotted path into the offending config entry when
    the error originates from file parsing.
    """

    def __init__(self, message, field=None):
        self.field = field
        if field is not None:
            message = f"{field}: {message}"
        super().__init__(message)


class NumericsError(MvkError):
    """Numerical failure (singular system, PSD violation, ...).

    ``condition`` optionally carries a condition-number estimate of the
    offending matrix.
    """

    def __init__(self, message, condition=None):
        self.condition = condition
        if condition is not None:
            message = f"{message} (condition estimate {condition:.3e})"
        super().__init__(message)
