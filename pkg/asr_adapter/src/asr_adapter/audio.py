"""16-bit PCM WAV loading at the model sample rate."""

from __future__ import annotations

import io
import wave
from dataclasses import dataclass

import numpy as np

from .errors import AudioDecodeError

SAMPLE_RATE = 16000


@dataclass(frozen=True)
class Clip:
    samples: np.ndarray  # float32 mono at SAMPLE_RATE
    duration_s: float  # duration of the source file, pre-resampling


def load_wav(path) -> Clip:
    """Decode a mono or stereo 16-bit PCM WAV; resample to 16 kHz."""
    try:
        with open(path, "rb") as fh:
            data = fh.read()
        with wave.open(io.BytesIO(data)) as wav:
            n_channels = wav.getnchannels()
            width = wav.getsampwidth()
            rate = wav.getframerate()
            n_frames = wav.getnframes()
            frames = wav.readframes(n_frames)
    except (wave.Error, EOFError, OSError) as exc:
        raise AudioDecodeError(f"{path}: not a readable RIFF/WAVE file") from exc
    if width != 2:
        raise AudioDecodeError(f"{path}: unsupported {8 * width}-bit samples")
    if n_channels not in (1, 2):
        raise AudioDecodeError(f"{path}: unsupported channel count {n_channels}")
    if n_frames == 0 or not frames:
        raise AudioDecodeError(f"{path}: no audio frames")
    raw = np.frombuffer(frames, dtype="<i2").astype(np.float32) / 32768.0
    if n_channels == 2:
        raw = raw.reshape(-1, 2).mean(axis=1)
    duration = len(raw) / rate
    if rate != SAMPLE_RATE:
        n_out = int(round(len(raw) * SAMPLE_RATE / rate))
        grid = np.linspace(0.0, len(raw) - 1, n_out)
        raw = np.interp(grid, np.arange(len(raw)), raw).astype(np.float32)
    return Clip(samples=raw, duration_s=duration)
