"""Exception hierarchy shared by all modules."""


class UctcError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(UctcError, ValueError):
    """Operand shapes or subsystem layouts do not fit together."""


class ShapeError(DimensionError):
    """Operand has the right size but the wrong structure (e.g. not Hermitian)."""


class ResourceError(UctcError):
    """Request exceeds a configured size cap of the dense simulator."""


class ValidationError(UctcError, ValueError):
    """Input object violates one of its invariants."""


class ParseError(UctcError, ValueError):
    """Text input could not be parsed; carries the offending line number."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
