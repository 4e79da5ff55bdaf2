"""Training-set assembly from reference annotations, audio, and lyrics.

Songs are cut into consecutive windows of the model's maximum input length
(30 s). Each window becomes one :class:`TrainingClip` whose target token
sequence interleaves lyric word tokens with boundary timestamp tokens in
temporal order. Lyric timing is not annotated at desk scale, so words are
spread uniformly over the song; that heuristic only affects which window a
word lands in, not the boundary targets.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .audio import SAMPLE_RATE, load_wav
from .errors import DataError, MissingAudioError
from .tokenizer import EOS_ID, MAX_CLIP_S, SOS_ID, Tokenizer, normalize_words

_DURATION_MISMATCH_S = 0.5


@dataclass(frozen=True)
class TrainingClip:
    """One windowed training example with token targets."""

    song_id: str
    audio_path: str
    window_start_s: float
    duration_s: float
    samples: np.ndarray
    lyric: str
    boundaries_s: tuple[float, ...]
    target_ids: tuple[int, ...]
    timestamp_base: int

    def __post_init__(self):
        if self.duration_s <= 0:
            raise DataError(f"{self.song_id}: non-positive clip duration")
        prev = 0.0
        for b in self.boundaries_s:
            if not 0.0 < b < self.duration_s:
                raise DataError(
                    f"{self.song_id}: boundary {b} outside (0, {self.duration_s})"
                )
            if b <= prev:
                raise DataError(f"{self.song_id}: boundaries not strictly increasing")
            prev = b
        stamps = [t for t in self.target_ids if t >= self.timestamp_base]
        if any(later < earlier for earlier, later in zip(stamps, stamps[1:])):
            raise DataError(f"{self.song_id}: timestamp tokens not monotone")
        if len(stamps) != len(self.boundaries_s):
            raise DataError(
                f"{self.song_id}: {len(stamps)} timestamp tokens for "
                f"{len(self.boundaries_s)} boundaries"
            )


@dataclass(frozen=True)
class TrainingSet:
    clips: tuple[TrainingClip, ...]
    tokenizer: Tokenizer


def _parse_reference(path) -> list[dict]:
    records = []
    seen = set()
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}:{lineno}: invalid JSON: {exc.msg}") from exc
        try:
            song_id = obj["song_id"]
            duration = float(obj["duration_s"])
            boundaries = [float(b) for b in obj["boundaries_s"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise DataError(f"{path}:{lineno}: malformed record") from exc
        if song_id in seen:
            raise DataError(f"{path}:{lineno}: duplicate song_id {song_id!r}")
        seen.add(song_id)
        prev = 0.0
        for b in boundaries:
            if not 0.0 < b < duration or b <= prev:
                raise DataError(
                    f"{path}:{lineno}: boundaries must be strictly increasing "
                    f"inside (0, {duration})"
                )
            prev = b
        records.append(
            {"song_id": song_id, "duration_s": duration, "boundaries_s": boundaries}
        )
    return records


def _load_lyrics(lyrics) -> dict[str, str]:
    if lyrics is None:
        return {}
    if isinstance(lyrics, dict):
        return dict(lyrics)
    try:
        payload = json.loads(Path(lyrics).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"cannot read lyrics file {lyrics}: {exc}") from exc
    if not isinstance(payload, dict):
        raise DataError("lyrics file must map song_id to text")
    return {str(k): str(v) for k, v in payload.items()}


def _window_targets(tokenizer, words_with_times, boundaries, start, length):
    """Merge word and timestamp tokens for one window, in temporal order."""
    events = []
    for b in boundaries:
        rel = b - start
        if 0.0 < rel < length:
            events.append((rel, 0, tokenizer.encode_time(rel)))
    kept_boundaries = tuple(e[0] for e in events)
    window_words = []
    for t, word in words_with_times:
        rel = t - start
        if 0.0 <= rel < length:
            events.append((rel, 1, tokenizer.encode_word(word)))
            window_words.append(word)
    events.sort(key=lambda e: (e[0], e[1]))
    target = (SOS_ID, *(e[2] for e in events), EOS_ID)
    return target, kept_boundaries, " ".join(window_words)


def build_training_set(reference, audio_dir, lyrics=None, tokenizer=None) -> TrainingSet:
    """Window every annotated song into model-sized training clips.

    ``reference`` is a path to annotation JSONL; ``lyrics`` maps song_id to
    transcript text (dict or JSON file). Records whose audio file
    (``<audio_dir>/<song_id>.wav``) is missing are collected and reported
    together.
    """
    records = _parse_reference(reference)
    lyric_map = _load_lyrics(lyrics)
    audio_root = Path(audio_dir)

    missing = [r["song_id"] for r in records if not (audio_root / f"{r['song_id']}.wav").exists()]
    if missing:
        raise MissingAudioError(missing)

    if tokenizer is None:
        tokenizer = Tokenizer.from_lyrics(lyric_map.values())

    clips = []
    for record in records:
        song_id = record["song_id"]
        path = audio_root / f"{song_id}.wav"
        clip_audio = load_wav(path)
        audio_dur = clip_audio.duration_s
        if abs(audio_dur - record["duration_s"]) > _DURATION_MISMATCH_S:
            raise DataError(
                f"{song_id}: annotation says {record['duration_s']} s but audio "
                f"is {audio_dur:.2f} s"
            )
        words = normalize_words(lyric_map.get(song_id, ""))
        words_with_times = [
            ((i + 0.5) / len(words) * audio_dur, w) for i, w in enumerate(words)
        ]

        start = 0.0
        while start < audio_dur:
            length = min(MAX_CLIP_S, audio_dur - start)
            target, kept, window_lyric = _window_targets(
                tokenizer, words_with_times, record["boundaries_s"], start, length
            )
            lo = int(round(start * SAMPLE_RATE))
            hi = int(round((start + length) * SAMPLE_RATE))
            clips.append(
                TrainingClip(
                    song_id=song_id,
                    audio_path=str(path),
                    window_start_s=start,
                    duration_s=length,
                    samples=clip_audio.samples[lo:hi],
                    lyric=window_lyric,
                    boundaries_s=kept,
                    target_ids=target,
                    timestamp_base=tokenizer.timestamp_base,
                )
            )
            start += MAX_CLIP_S
    return TrainingSet(clips=tuple(clips), tokenizer=tokenizer)
