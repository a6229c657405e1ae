"""Exception types shared across the package."""


class InvalidArgumentError(ValueError):
    """Raised when an input violates a documented precondition."""


class NumericalError(RuntimeError):
    """Raised when a quadrature or fit fails to reach its tolerance.

    The ``diagnostics`` mapping carries whatever the failing routine knew
    (achieved error estimate, number of panels, ...).
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class ConfigError(ValueError):
    """Raised for malformed or semantically invalid run configurations."""

    def __init__(self, message, key=None, line=None, column=None):
        super().__init__(message)
        self.key = key
        self.line = line
        self.column = column
