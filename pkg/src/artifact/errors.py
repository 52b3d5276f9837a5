class ArtifactError(Exception):
    exit_code = 1


class DomainError(ArtifactError, ValueError):
    """Argument outside the domain of an operation."""

    exit_code = 2


class StructuralError(ArtifactError):
    """Inputs that cannot be combined, e.g. incommensurable lattices."""

    exit_code = 2


class TableLookupError(ArtifactError, KeyError):
    """Constant requested at a point that is not tabulated."""

    exit_code = 2


class NumericError(ArtifactError, ArithmeticError):
    exit_code = 3

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
