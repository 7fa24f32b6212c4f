"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Input data violates a structural or numeric invariant."""


class ParseError(ValidationError):
    """A text input could not be parsed; carries the offending line number."""

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class ConfigurationError(ValueError):
    """A circuit or sampler configuration refers to something that does not exist."""


class DomainError(ValueError):
    """A numeric argument lies outside the domain of the function."""
