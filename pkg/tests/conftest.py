import numpy as np
import pytest

from motifkit import BoundaryRecord, Corpus


@pytest.fixture
def make_record():
    def _make(
        song_id="song-a",
        category="agricultural",
        duration_s=120.0,
        boundaries_s=(10.0, 20.0, 30.0),
        source="reference",
    ):
        return BoundaryRecord(
            song_id=song_id,
            category=category,
            duration_s=duration_s,
            boundaries_s=tuple(boundaries_s),
            source=source,
        )

    return _make


@pytest.fixture
def make_corpus(make_record):
    def _make(*records):
        return Corpus(tuple(records))

    return _make


@pytest.fixture
def rng():
    return np.random.default_rng(20260823)
