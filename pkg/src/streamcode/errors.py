"""Exception hierarchy shared across the package."""


class StreamCodeError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(StreamCodeError, ValueError):
    """Code or channel parameters violate their ordering constraints."""


class DimensionError(StreamCodeError, ValueError):
    """Matrix or vector shapes do not conform."""


class FieldTooSmallError(StreamCodeError, ValueError):
    """The prime field is too small for the requested construction."""


class ConstructionExhaustedError(StreamCodeError, RuntimeError):
    """Rejection sampling hit the attempt limit without a verified code.

    Usually a sign that the field is too small for the parameters.
    """

    def __init__(self, message: str, attempts: int):
        super().__init__(message)
        self.attempts = attempts


class SearchBudgetError(StreamCodeError, RuntimeError):
    """An exhaustive enumeration would exceed the configured budget."""


class ConfigError(StreamCodeError, ValueError):
    """A run configuration file failed validation."""
