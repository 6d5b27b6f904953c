"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """A numerical routine was asked for something its settings cannot deliver."""


class NumericalError(RuntimeError):
    """An adaptive quadrature failed to reach its tolerance."""


class MeshFormatError(ValueError):
    """Malformed mesh file.  ``lineno`` is 1-based."""

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class MeshValidationError(ValueError):
    """A mesh violates one of the TriangleMesh invariants."""


class OrientationError(MeshValidationError):
    """A triangle is clockwise or degenerate."""
