"""Exception hierarchy shared by all modules."""


class SeptreeError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(SeptreeError, ValueError):
    """An argument or input value is out of its allowed range."""


class GraphParseError(SeptreeError):
    """A DIMACS line could not be parsed."""

    def __init__(self, message: str, line_number: int, source: str = ""):
        where = f"{source}:{line_number}" if source else f"line {line_number}"
        super().__init__(f"{where}: {message}")
        self.line_number = line_number
        self.source = source


class StructuralError(SeptreeError):
    """Input files are individually well formed but inconsistent with each other."""


class StaleIndexError(SeptreeError):
    """An index was built for a different graph than the one supplied."""


class IndexFormatError(SeptreeError):
    """Base class for failures while decoding a stored index."""


class BadMagicError(IndexFormatError):
    pass


class UnsupportedVersionError(IndexFormatError):
    pass


class ChecksumError(IndexFormatError):
    pass


class TruncatedIndexError(IndexFormatError):
    pass
