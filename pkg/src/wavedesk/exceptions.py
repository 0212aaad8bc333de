"""Exception hierarchy shared across the package."""


class WaveDeskError(Exception):
    """Base class for all package errors."""


class ParseError(WaveDeskError):
    """A candle document could not be parsed.

    ``row`` is the 1-based data row (header excluded) when known.
    """

    def __init__(self, message, row=None):
        self.row = row
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)


class ValidationError(WaveDeskError):
    """A value violates a domain invariant."""

    def __init__(self, message, row=None):
        self.row = row
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)


class UnsupportedResampleError(WaveDeskError):
    """Resampling was requested towards a finer interval."""


class InvalidSpecError(WaveDeskError):
    """A synthetic-series specification is unusable."""


class EmptyInputError(WaveDeskError):
    """An operation received an empty candle series."""


class InvalidAnchorError(WaveDeskError):
    """Fibonacci anchors are not ordered high > low."""


class InsufficientDataError(WaveDeskError):
    """Not enough candles exist to issue or evaluate a forecast."""


class StoreError(WaveDeskError):
    """The knowledge store could not be read or written."""


class DataLoadError(WaveDeskError):
    """The data engineer stage could not obtain candles."""


class RenderError(WaveDeskError):
    """A chart could not be rendered from the given bundle."""


class ConfigError(WaveDeskError):
    """Configuration is malformed or out of range."""
