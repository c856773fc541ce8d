"""Exception types shared across the package."""


class GhostmapError(Exception):
    """Base class for all ghostmap errors."""


class ConfigError(GhostmapError):
    """A hyperparameter or input-size constraint was violated.

    ``field`` names the offending configuration field.
    """

    def __init__(self, field: str, message: str):
        self.field = field
        self.message = message
        super().__init__(f"{field}: {message}")


class DegenerateInput(GhostmapError):
    """Input contains non-finite values or has no usable extent."""


class FitError(GhostmapError):
    """Curve fitting failed to converge."""


class ParseError(GhostmapError):
    """A text input could not be parsed; carries line/column context."""

    def __init__(self, message: str, line: int, column: int | None = None):
        self.line = line
        self.column = column
        where = f"line {line}" if column is None else f"line {line}, column {column}"
        super().__init__(f"{message} ({where})")


class ShapeError(GhostmapError):
    """Rows of a tabular input disagree in width."""

    def __init__(self, message: str, line: int):
        self.line = line
        super().__init__(f"{message} (line {line})")


class MagicError(GhostmapError):
    """A binary file does not start with the expected magic bytes."""


class TruncationError(GhostmapError):
    """A binary file is shorter than its header promises."""

    def __init__(self, expected: int, actual: int):
        self.expected = expected
        self.actual = actual
        super().__init__(f"expected {expected} bytes, found {actual}")


class IoError(GhostmapError):
    """Reading or writing a result file failed."""


class DatasetError(GhostmapError):
    """A benchmark dataset could not be loaded or generated."""
