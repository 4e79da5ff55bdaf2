"""Error types shared across the adapter."""


class AdapterError(Exception):
    """Base class for adapter failures."""


class DataError(AdapterError):
    """Invalid annotation, lyric, or clip data."""


class MissingAudioError(DataError):
    """Reference records whose audio files cannot be found."""

    def __init__(self, song_ids):
        self.song_ids = tuple(song_ids)
        super().__init__("missing audio for: " + ", ".join(self.song_ids))


class AudioDecodeError(AdapterError):
    """A file that could not be decoded as 16-bit PCM WAV."""
