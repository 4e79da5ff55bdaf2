"""Token vocabulary: lyric words plus quantized timestamp tokens.

Boundary times are carried as special tokens on a fixed 0.02 s grid, the
native resolution of the base recognizer family this adapter stands in
for. ``encode_time``/``decode_time`` round-trip any time within a clip to
at most half a grid step of error.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import DataError

TIMESTAMP_RESOLUTION_S = 0.02
MAX_CLIP_S = 30.0

PAD_ID = 0
SOS_ID = 1
EOS_ID = 2
UNK_ID = 3
_SPECIALS = ("<pad>", "<sos>", "<eos>", "<unk>")


def normalize_words(text: str) -> list[str]:
    """Lowercased alphanumeric word stream used for targets and WER."""
    words = []
    for raw in text.split():
        word = "".join(ch for ch in raw.lower() if ch.isalnum())
        if word:
            words.append(word)
    return words


@dataclass(frozen=True)
class Tokenizer:
    """Fixed vocabulary of specials, lyric words, and timestamp tokens."""

    words: tuple[str, ...]
    word_to_id: dict[str, int] = field(repr=False, compare=False, default=None)

    def __post_init__(self):
        mapping = {w: UNK_ID + 1 + i for i, w in enumerate(self.words)}
        if len(mapping) != len(self.words):
            raise DataError("duplicate words in vocabulary")
        object.__setattr__(self, "word_to_id", mapping)

    @classmethod
    def from_lyrics(cls, texts) -> "Tokenizer":
        vocab = set()
        for text in texts:
            vocab.update(normalize_words(text))
        return cls(words=tuple(sorted(vocab)))

    @property
    def timestamp_base(self) -> int:
        return UNK_ID + 1 + len(self.words)

    @property
    def n_timestamps(self) -> int:
        return int(round(MAX_CLIP_S / TIMESTAMP_RESOLUTION_S)) + 1

    @property
    def vocab_size(self) -> int:
        return self.timestamp_base + self.n_timestamps

    def encode_word(self, word: str) -> int:
        return self.word_to_id.get(word, UNK_ID)

    def encode_time(self, seconds: float) -> int:
        if not 0.0 <= seconds <= MAX_CLIP_S:
            raise DataError(f"time {seconds} outside [0, {MAX_CLIP_S}]")
        step = round(seconds / TIMESTAMP_RESOLUTION_S)
        return self.timestamp_base + min(step, self.n_timestamps - 1)

    def is_timestamp(self, token_id: int) -> bool:
        return self.timestamp_base <= token_id < self.vocab_size

    def decode_time(self, token_id: int) -> float:
        if not self.is_timestamp(token_id):
            raise DataError(f"token {token_id} is not a timestamp")
        return (token_id - self.timestamp_base) * TIMESTAMP_RESOLUTION_S

    def decode_words(self, token_ids) -> list[str]:
        """Lyric words only; specials and timestamps are dropped."""
        out = []
        for tid in token_ids:
            if UNK_ID < tid < self.timestamp_base:
                out.append(self.words[tid - UNK_ID - 1])
        return out

    def token_text(self, token_id: int) -> str:
        if token_id < len(_SPECIALS):
            return _SPECIALS[token_id]
        if token_id < self.timestamp_base:
            return self.words[token_id - UNK_ID - 1]
        return f"<|{self.decode_time(token_id):.2f}|>"

    def to_json(self) -> str:
        return json.dumps({"words": list(self.words)})

    @classmethod
    def from_json(cls, text: str) -> "Tokenizer":
        payload = json.loads(text)
        return cls(words=tuple(payload["words"]))
