"""Adapter acceptance gate: cross-package contract and training smoke.

Each test prints one ``[acceptance] <name>: PASS``/``FAIL`` line (visible
with ``pytest -s``). The contract test feeds adapter output to the primary
toolkit's parser, which is the interchange boundary between the two
packages.
"""

import math

import numpy as np
import pytest

from motifkit import parse_annotations

from asr_adapter import (
    TIMESTAMP_RESOLUTION_S,
    Checkpoint,
    TrainConfig,
    Tokenizer,
    build_model,
    build_training_set,
    finetune,
    infer_boundaries,
    resolve_spec,
    select_best,
)

from conftest import ref_line, write_wav


def _verdict(name, ok, detail=""):
    print(f"[acceptance] {name}: {'PASS' if ok else 'FAIL'}", flush=True)
    assert ok, f"{name}: {detail}"


def test_emitted_jsonl_passes_primary_parser(tmp_path):
    tok = Tokenizer.from_lyrics(["arirang arariyo hey nong seong"])
    model = build_model(resolve_spec("local-micro"), tok.vocab_size, seed=3)
    audio = tmp_path / "audio"
    audio.mkdir()
    durations = [31.2, 31.5, 32.0, 33.1, 34.0]
    for i, seconds in enumerate(durations):
        write_wav(audio / f"clip-{i}.wav", seconds, freq=200.0 + 40.0 * i)
    out = tmp_path / "pred.jsonl"
    infer_boundaries(model, tok, audio, out_path=out)

    corpus = parse_annotations(out.read_text(encoding="utf-8"))
    ok = len(corpus) == 5 and all(r.source == "predicted" for r in corpus)

    # emitted times sit on the model's timestamp grid
    worst = 0.0
    for record in corpus:
        for b in record.boundaries_s:
            steps = b / TIMESTAMP_RESOLUTION_S
            worst = max(worst, abs(steps - round(steps)) * TIMESTAMP_RESOLUTION_S)
    ok = ok and worst <= TIMESTAMP_RESOLUTION_S
    _verdict("jsonl-contract", ok, f"records={len(corpus)} worst grid error={worst}")


def test_timestamp_round_trip_within_resolution():
    tok = Tokenizer.from_lyrics([])
    rng = np.random.default_rng(11)
    worst = max(
        abs(tok.decode_time(tok.encode_time(float(t))) - float(t))
        for t in rng.uniform(0.0, 30.0, size=1000)
    )
    _verdict("timestamp-round-trip", worst <= TIMESTAMP_RESOLUTION_S, f"worst={worst}")


def test_training_smoke_and_selection(tmp_path):
    audio = tmp_path / "audio"
    audio.mkdir()
    write_wav(audio / "a.wav", 6.0)
    write_wav(audio / "b.wav", 6.0, freq=330.0)
    ref = tmp_path / "ref.jsonl"
    ref.write_text(
        ref_line("a", 6.0, [2.0]) + "\n" + ref_line("b", 6.0, [3.0]) + "\n",
        encoding="utf-8",
    )
    ts = build_training_set(ref, audio, lyrics={"a": "hey la", "b": "nong se"})
    result = finetune(
        ts, TrainConfig(base_model="local-micro", batch_size=2, max_steps=1)
    )
    ok = len(result.losses) == 1 and math.isfinite(result.losses[0])

    picks = select_best(
        [
            Checkpoint(step=100, val_wer=0.4, train_loss=1.0, state_dict={}),
            Checkpoint(step=200, val_wer=0.3, train_loss=1.0, state_dict={}),
        ]
    )
    ok = ok and picks.val_wer == 0.3
    _verdict("training-smoke", ok, f"loss={result.losses} best_wer={picks.val_wer}")
