"""Exception types shared across the package."""


class KoszulKitError(Exception):
    pass


class ParseError(KoszulKitError):
    def __init__(self, line: int, col: int, msg: str):
        super().__init__(f"line {line}, col {col}: {msg}")
        self.line = line
        self.col = col
        self.msg = msg


class RealizationError(KoszulKitError):
    """Presentation cannot be realized within the given bounds."""


class ValidationError(KoszulKitError):
    """An algebraic invariant failed on concrete data."""


class WindowError(KoszulKitError):
    """A requested computation exceeds its certified window."""


class EnumerationError(KoszulKitError):
    """Exhaustive enumeration requested over a non-enumerable field."""
