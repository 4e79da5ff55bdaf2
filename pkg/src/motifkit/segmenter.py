"""Silence-based baseline segmenter for WAV recordings.

A non-learned fallback so the whole pipeline runs on raw audio: frame RMS
energy is computed at hop intervals, frames below a fraction of the median
RMS count as silent, and each sufficiently long silent run contributes one
predicted boundary at its temporal midpoint. The threshold is relative to
the recording's own median so gain differences between field recordings do
not need per-file tuning.
"""

from __future__ import annotations

import io
import math
import wave
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .annotations import BoundaryRecord
from .errors import AudioFormatError, ValidationError


@dataclass(frozen=True)
class AudioBuffer:
    """Mono audio with amplitudes in [-1, 1]."""

    sample_rate: int
    samples: np.ndarray

    def __post_init__(self):
        if self.sample_rate <= 0:
            raise ValidationError(f"sample_rate must be > 0, got {self.sample_rate}")
        samples = np.asarray(self.samples, dtype=float)
        object.__setattr__(self, "samples", samples)
        if samples.ndim != 1 or samples.size == 0:
            raise ValidationError("samples must be a nonempty 1-d sequence")

    @property
    def duration_s(self) -> float:
        return self.samples.size / self.sample_rate


@dataclass(frozen=True)
class SegmenterConfig:
    frame_s: float = 0.025
    hop_s: float = 0.010
    threshold_ratio: float = 0.25
    min_silence_s: float = 0.3

    def __post_init__(self):
        for name in ("frame_s", "hop_s", "threshold_ratio", "min_silence_s"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValidationError(f"{name} must be > 0, got {value}")
        if self.hop_s > self.frame_s:
            raise ValidationError(
                f"hop_s {self.hop_s} must not exceed frame_s {self.frame_s}"
            )


def read_wav(data: bytes) -> AudioBuffer:
    """Decode PCM 16-bit RIFF/WAVE bytes; stereo is averaged to mono.

    Samples are scaled by 1/32768, so full-scale input maps to
    +/- 32767/32768.
    """
    try:
        with wave.open(io.BytesIO(data), "rb") as wav:
            n_channels = wav.getnchannels()
            sample_width = wav.getsampwidth()
            sample_rate = wav.getframerate()
            n_frames = wav.getnframes()
            frames = wav.readframes(n_frames)
    except (wave.Error, EOFError) as exc:
        raise AudioFormatError(f"not a readable RIFF/WAVE file: {exc}") from exc
    if sample_width != 2:
        raise AudioFormatError(
            f"unsupported format chunk: {8 * sample_width}-bit samples; "
            "only PCM 16-bit is supported"
        )
    if n_channels not in (1, 2):
        raise AudioFormatError(
            f"unsupported format chunk: {n_channels} channels; "
            "only mono or stereo is supported"
        )
    if not frames:
        raise AudioFormatError("audio stream contains no frames")
    raw = np.frombuffer(frames, dtype="<i2").astype(float)
    if n_channels == 2:
        raw = raw.reshape(-1, 2).mean(axis=1)
    return AudioBuffer(sample_rate=sample_rate, samples=raw / 32768.0)


def frame_rms(audio: AudioBuffer, config: SegmenterConfig) -> np.ndarray:
    """RMS per analysis frame, one frame every hop."""
    frame_n, hop_n = _frame_geometry(audio, config)
    if audio.samples.size < frame_n:
        raise ValidationError(
            f"audio of {audio.samples.size} samples is shorter than one "
            f"{frame_n}-sample frame"
        )
    n_frames = 1 + (audio.samples.size - frame_n) // hop_n
    sq = np.concatenate([[0.0], np.cumsum(audio.samples * audio.samples)])
    starts = np.arange(n_frames) * hop_n
    energy = sq[starts + frame_n] - sq[starts]
    # cumsum cancellation can leave tiny negatives on silent stretches
    return np.sqrt(np.maximum(energy, 0.0) / frame_n)


def segment_energy(
    audio: AudioBuffer, config: SegmenterConfig = SegmenterConfig()
) -> list[float]:
    """Predicted boundaries: midpoints of long low-energy runs.

    A frame is silent when its RMS is strictly below threshold_ratio times
    the median frame RMS; maximal silent runs spanning at least
    min_silence_s yield one boundary each. All-silence input has median
    zero, so nothing falls strictly below the threshold and no boundary is
    emitted.
    """
    rms = frame_rms(audio, config)
    frame_n, hop_n = _frame_geometry(audio, config)
    threshold = config.threshold_ratio * float(np.median(rms))
    silent = rms < threshold
    edges = np.diff(np.concatenate([[0], silent.astype(int), [0]]))
    run_starts = np.flatnonzero(edges == 1)
    run_ends = np.flatnonzero(edges == -1) - 1  # inclusive frame index
    boundaries = []
    duration = audio.duration_s
    for first, last in zip(run_starts, run_ends):
        start_sample = first * hop_n
        end_sample = last * hop_n + frame_n
        if (end_sample - start_sample) / audio.sample_rate < config.min_silence_s:
            continue
        midpoint = (start_sample + end_sample) / 2.0 / audio.sample_rate
        if 0.0 < midpoint < duration:
            boundaries.append(midpoint)
    return boundaries


def segment_file(
    path: str | Path,
    config: SegmenterConfig = SegmenterConfig(),
    category: str = "unknown",
) -> BoundaryRecord:
    """Segment one WAV file into a predicted-source record.

    The song_id is the file name without extension; the category defaults
    to a placeholder because raw audio carries no category label.
    """
    path = Path(path)
    audio = read_wav(path.read_bytes())
    return BoundaryRecord(
        song_id=path.stem,
        category=category,
        duration_s=audio.duration_s,
        boundaries_s=tuple(segment_energy(audio, config)),
        source="predicted",
    )


def _frame_geometry(audio: AudioBuffer, config: SegmenterConfig) -> tuple[int, int]:
    frame_n = max(1, round(config.frame_s * audio.sample_rate))
    hop_n = max(1, round(config.hop_s * audio.sample_rate))
    return frame_n, min(hop_n, frame_n)
