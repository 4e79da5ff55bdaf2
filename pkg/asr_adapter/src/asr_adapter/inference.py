"""Boundary inference over a directory of WAV files.

Each file is cut into model-length windows, all windows of a song are
decoded as one batch, and decoded timestamp tokens become absolute times
(window offset plus token value). Times are deduplicated into a strictly
increasing list and stamps outside the open interval (0, duration) are
discarded, so every emitted record satisfies the annotation schema.
Output is written one line per song and flushed before the next song
starts.
"""

from __future__ import annotations

import json
import warnings
from pathlib import Path

import numpy as np
import torch

from .audio import SAMPLE_RATE, load_wav
from .errors import AdapterError, AudioDecodeError
from .model import BoundaryASRModel, greedy_decode
from .tokenizer import EOS_ID, MAX_CLIP_S, SOS_ID, Tokenizer


def _song_boundaries(model, tokenizer, samples: np.ndarray, duration_s: float, max_len: int):
    window_samples = int(round(MAX_CLIP_S * SAMPLE_RATE))
    starts = list(range(0, len(samples), window_samples))
    batch = np.zeros((len(starts), window_samples), dtype=np.float32)
    for i, lo in enumerate(starts):
        chunk = samples[lo : lo + window_samples]
        batch[i, : len(chunk)] = chunk
    decoded = greedy_decode(
        model, torch.from_numpy(batch), SOS_ID, EOS_ID, max_len=max_len
    )
    times = []
    for i, row in enumerate(decoded):
        offset = starts[i] / SAMPLE_RATE
        for tid in row:
            if tokenizer.is_timestamp(tid):
                times.append(offset + tokenizer.decode_time(tid))
    unique = np.unique(np.round(np.asarray(times, dtype=float), 3))
    return [float(t) for t in unique if 0.0 < t < duration_s]


def infer_boundaries(
    model: BoundaryASRModel,
    tokenizer: Tokenizer,
    audio_dir,
    out_path=None,
    category: str = "unknown",
    max_len: int = 64,
) -> list[dict]:
    """Predict boundaries for every ``*.wav`` under ``audio_dir``.

    Undecodable files produce a warning and are skipped; if every file
    fails an :class:`AdapterError` is raised. Returns the emitted records;
    when ``out_path`` is given they are also written as JSONL, flushed
    after each song.
    """
    root = Path(audio_dir)
    files = sorted(
        (p for p in root.iterdir() if p.suffix.lower() == ".wav"),
        key=lambda p: p.name,
    )
    records: list[dict] = []
    failures = 0
    writer = open(out_path, "w", encoding="utf-8", newline="\n") if out_path else None
    try:
        for path in files:
            try:
                clip = load_wav(path)
            except AudioDecodeError as exc:
                warnings.warn(f"skipping {path.name}: {exc}")
                failures += 1
                continue
            boundaries = _song_boundaries(
                model, tokenizer, clip.samples, clip.duration_s, max_len
            )
            record = {
                "song_id": path.stem,
                "category": category,
                "duration_s": round(clip.duration_s, 3),
                "boundaries_s": boundaries,
                "source": "predicted",
            }
            records.append(record)
            if writer is not None:
                writer.write(json.dumps(record) + "\n")
                writer.flush()
    finally:
        if writer is not None:
            writer.close()
    if files and failures == len(files):
        raise AdapterError(f"all {failures} audio files failed to decode")
    return records
