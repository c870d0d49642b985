"""Exception types shared across the engine."""


class SemcurError(Exception):
    """Base class for all engine errors."""


class ValidationError(SemcurError):
    """An input violated a documented invariant."""


class EmptyTextError(ValidationError):
    """Text input was empty or whitespace-only."""


class TranscriptParseError(SemcurError):
    """A transcript file line could not be parsed."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class CalibrationError(SemcurError):
    """Depth calibration inputs were unusable."""


class CommitRejected(SemcurError):
    """A depth commit was rejected; the stored reference frame is unchanged."""


class ProtocolError(SemcurError):
    """A wire message was malformed or carried an unsupported version."""
