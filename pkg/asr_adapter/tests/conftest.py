import json
import wave

import numpy as np
import pytest

SR = 16000


def write_wav(path, seconds, freq=220.0, sr=SR, amplitude=0.4, stereo=False):
    t = np.arange(int(round(seconds * sr))) / sr
    x = (amplitude * np.sin(2 * np.pi * freq * t) * 32767).astype("<i2")
    if stereo:
        x = np.repeat(x, 2)
    with wave.open(str(path), "wb") as w:
        w.setnchannels(2 if stereo else 1)
        w.setsampwidth(2)
        w.setframerate(sr)
        w.writeframes(x.tobytes())


def write_silent_wav(path, seconds, sr=SR):
    with wave.open(str(path), "wb") as w:
        w.setnchannels(1)
        w.setsampwidth(2)
        w.setframerate(sr)
        w.writeframes(b"\x00\x00" * int(round(seconds * sr)))


def ref_line(song_id, duration, boundaries, category="folk"):
    return json.dumps(
        {
            "song_id": song_id,
            "category": category,
            "duration_s": duration,
            "boundaries_s": list(boundaries),
            "source": "reference",
        }
    )


@pytest.fixture
def song_corpus(tmp_path):
    """One 8 s annotated song with lyrics, ready for build_training_set."""
    audio = tmp_path / "audio"
    audio.mkdir()
    write_wav(audio / "s.wav", 8.0)
    ref = tmp_path / "ref.jsonl"
    ref.write_text(ref_line("s", 8.0, [2.5, 5.0]) + "\n", encoding="utf-8")
    return ref, audio, {"s": "hey nong arirang"}
