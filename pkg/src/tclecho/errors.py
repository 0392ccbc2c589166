"""Exception types raised by the engines and parsers."""


class TCLEchoError(Exception):
    """Base class for all package errors."""


class DomainError(TCLEchoError, ValueError):
    """Input outside the mathematical domain of an operation."""


class DimensionError(TCLEchoError, MemoryError):
    """Hilbert space larger than the dense-propagation cap."""


class GridMismatchError(TCLEchoError, ValueError):
    pass


class ConfigError(TCLEchoError, ValueError):
    pass


class BathGenerationError(TCLEchoError, RuntimeError):
    pass


class FitError(TCLEchoError, RuntimeError):
    pass


class ParseError(TCLEchoError, ValueError):
    """Malformed input file; carries the 1-based line number when known."""

    def __init__(self, message: str, path=None, line: int | None = None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}"
        if line is not None:
            where = f"{where}:{line}" if where else f"line {line}"
        super().__init__(f"{where}: {message}" if where else message)
