"""Exception types raised by the index structures and the harness."""


class IRSError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(IRSError, ValueError):
    """Bad user input: malformed intervals, weights, sizes or config."""


class EmptyWeights(ValidationError):
    pass


class InvalidWeight(ValidationError):
    pass


class InvalidSampleSize(ValidationError):
    pass


class DuplicateId(ValidationError, KeyError):
    pass


class NotFound(IRSError, KeyError):
    pass


class MissingWeights(ValidationError):
    pass


class DegenerateSelectivity(IRSError, RuntimeError):
    """Raised when rejection sampling keeps failing on a non-empty candidate set."""


class DataFormatError(ValidationError):
    """A CSV line could not be parsed; carries the 1-based line number."""

    def __init__(self, path, lineno, message):
        self.path = path
        self.lineno = lineno
        super().__init__(f"{path}:{lineno}: {message}")
