"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Malformed input: bad matching, size mismatch, unparsable encoding."""


class ResourceLimitError(RuntimeError):
    """A requested computation exceeds a configured size limit."""

    def __init__(self, message: str, parameter: str | None = None):
        super().__init__(message)
        self.parameter = parameter
