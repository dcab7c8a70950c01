"""Exception types raised across the package."""


class ConfigurationError(ValueError):
    """Invalid parameters or configuration values."""


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


class ParseError(ValueError):
    """Malformed input file; carries the offending line number."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ConstructionError(RuntimeError):
    """A randomized construction could not satisfy its constraints."""
