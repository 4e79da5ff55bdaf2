"""Exception types shared across the toolkit."""

from __future__ import annotations


class MotifkitError(Exception):
    """Base class for all toolkit errors."""


class ParseError(MotifkitError):
    """A line of an input file could not be decoded."""

    def __init__(self, message: str, line_no: int | None = None):
        self.line_no = line_no
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)


class ValidationError(MotifkitError):
    """Well-formed input that violates a data invariant."""

    def __init__(self, message: str, song_id: str | None = None, field: str | None = None):
        self.song_id = song_id
        self.field = field
        prefix = ""
        if song_id is not None:
            prefix += f"song {song_id!r}"
        if field is not None:
            prefix += f" field {field!r}" if prefix else f"field {field!r}"
        super().__init__(f"{prefix}: {message}" if prefix else message)


class AudioFormatError(MotifkitError):
    """An audio file uses an encoding the reader does not support."""


class NumericalError(MotifkitError):
    """A numerical routine failed (singular matrix, non-convergence)."""
