"""Windowed structural features: motif count and duration entropy.

Every complete window of ``window_len_s`` seconds (60 by default) yields one
feature row. A motif belongs to the window containing its onset and
contributes its *full* duration, never a clipped one: a motif is treated as
a perceptual unit that should not be split by an analysis grid.

Duration entropy is the Shannon entropy of the histogram of log2 durations,
with bin edges anchored at integer multiples of the bin width (0.2 by
default) so that results are reproducible and scaling all durations by a
whole number of bins leaves the entropy unchanged.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .annotations import Corpus, Motif
from .errors import ParseError, ValidationError
from ._fmt import csv_field, fmt_num

DEFAULT_WINDOW_S = 60.0
DEFAULT_BIN_WIDTH = 0.2

_CSV_HEADER = "song_id,category,window_index,motif_count,duration_entropy_bits"


@dataclass(frozen=True)
class WindowFeature:
    """One window's observation: the unit consumed by the MANOVA stage.

    ``motif_count`` is integral in the default mode and fractional only
    when a trailing partial window is admitted and rescaled.
    """

    song_id: str
    category: str
    window_index: int
    motif_count: float
    duration_entropy_bits: float


@dataclass(frozen=True)
class FeatureTable:
    """Feature rows with (song_id, window_index) unique."""

    rows: tuple[WindowFeature, ...]

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))
        seen = set()
        for row in self.rows:
            key = (row.song_id, row.window_index)
            if key in seen:
                raise ValidationError(
                    f"duplicate feature row for window {row.window_index}",
                    song_id=row.song_id,
                )
            seen.add(key)

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)


def window_motifs(
    motifs: Sequence[Motif], window_len_s: float, duration_s: float
) -> list[tuple[int, list[Motif]]]:
    """Partition a song's motifs into complete windows by onset.

    Returns ``(window_index, motifs)`` for every window ``[w*L, (w+1)*L)``
    with ``(w+1)*L <= duration_s``; a trailing partial window is not
    returned. Windows without any onset appear with an empty list. A song
    shorter than one window yields an empty result.
    """
    if window_len_s <= 0:
        raise ValueError("window_len_s must be > 0")
    _check_tiling(motifs, duration_s)
    n_windows = int(duration_s // window_len_s)
    # float floor can land one off around exact multiples; nudge to the
    # largest n with n * L <= duration
    while n_windows > 0 and n_windows * window_len_s > duration_s:
        n_windows -= 1
    while (n_windows + 1) * window_len_s <= duration_s:
        n_windows += 1
    buckets: list[list[Motif]] = [[] for _ in range(n_windows)]
    for motif in motifs:
        w = int(motif.onset_s // window_len_s)
        if w < n_windows:
            buckets[w].append(motif)
    return list(enumerate(buckets))


def duration_entropy(
    durations_s: Iterable[float],
    bin_width: float = DEFAULT_BIN_WIDTH,
    base: float = 2.0,
) -> float:
    """Entropy of the binned log2 duration distribution.

    Each duration d maps to bin ``floor(log2(d) / bin_width)``; negative
    bins are fine (durations below one second). With ``base=2`` (default)
    the result is in bits. Zero or one duration gives zero entropy.
    """
    if bin_width <= 0:
        raise ValueError("bin_width must be > 0")
    if base <= 1:
        raise ValueError("entropy base must be > 1")
    d = np.asarray(tuple(durations_s), dtype=float)
    if d.size and (not np.all(np.isfinite(d)) or np.any(d <= 0)):
        raise ValueError("durations must be finite and > 0")
    if d.size <= 1:
        return 0.0
    bins = np.floor(np.log2(d) / bin_width)
    _, counts = np.unique(bins, return_counts=True)
    p = counts / d.size
    if base == 2.0:
        h = -(p * np.log2(p)).sum()
    else:
        h = -(p * (np.log(p) / math.log(base))).sum()
    return float(h) + 0.0  # fold -0.0 to +0.0


def extract_features(
    corpus: Corpus,
    window_len_s: float = DEFAULT_WINDOW_S,
    bin_width: float = DEFAULT_BIN_WIDTH,
    include_partial: bool = False,
    entropy_base: float = 2.0,
) -> FeatureTable:
    """Compute one feature row per complete window per song.

    Windows containing no motif onset are omitted (entropy of an empty
    sample is undefined); windows with a single motif get entropy zero.
    With ``include_partial`` the trailing partial window is admitted too,
    its motif count rescaled by ``window_len_s / actual_length`` and its
    entropy left unscaled.
    """
    rows: list[WindowFeature] = []
    for rec in corpus:
        motifs = rec.motifs()
        for w, assigned in window_motifs(motifs, window_len_s, rec.duration_s):
            if not assigned:
                continue
            rows.append(
                WindowFeature(
                    song_id=rec.song_id,
                    category=rec.category,
                    window_index=w,
                    motif_count=float(len(assigned)),
                    duration_entropy_bits=duration_entropy(
                        (m.duration_s for m in assigned), bin_width, entropy_base
                    ),
                )
            )
        if include_partial:
            row = _partial_window_row(rec, motifs, window_len_s, bin_width, entropy_base)
            if row is not None:
                rows.append(row)
    rows.sort(key=lambda r: (r.song_id, r.window_index))
    return FeatureTable(tuple(rows))


def _partial_window_row(rec, motifs, window_len_s, bin_width, entropy_base):
    n_complete = len(window_motifs(motifs, window_len_s, rec.duration_s))
    start = n_complete * window_len_s
    actual = rec.duration_s - start
    if actual <= 0:
        return None
    assigned = [m for m in motifs if m.onset_s >= start]
    if not assigned:
        return None
    return WindowFeature(
        song_id=rec.song_id,
        category=rec.category,
        window_index=n_complete,
        motif_count=len(assigned) * window_len_s / actual,
        duration_entropy_bits=duration_entropy(
            (m.duration_s for m in assigned), bin_width, entropy_base
        ),
    )


def features_to_csv(table: FeatureTable) -> str:
    """Render the feature CSV consumed by the statistics and plot stages."""
    lines = [_CSV_HEADER]
    for r in table:
        lines.append(
            f"{csv_field(r.song_id)},{csv_field(r.category)},{r.window_index},"
            f"{fmt_num(r.motif_count)},{r.duration_entropy_bits!r}"
        )
    return "\n".join(lines) + "\n"


def features_from_csv(text: str) -> FeatureTable:
    """Parse the feature CSV back into a table."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != _CSV_HEADER:
        raise ParseError(f"expected header {_CSV_HEADER!r}", line_no=1)
    rows = []
    reader = csv.reader(io.StringIO("\n".join(lines[1:])))
    for line_no, parts in enumerate(reader, start=2):
        if len(parts) != 5:
            raise ParseError(f"expected 5 fields, got {len(parts)}", line_no=line_no)
        try:
            rows.append(
                WindowFeature(
                    song_id=parts[0],
                    category=parts[1],
                    window_index=int(parts[2]),
                    motif_count=float(parts[3]),
                    duration_entropy_bits=float(parts[4]),
                )
            )
        except ValueError as exc:
            raise ParseError(str(exc), line_no=line_no) from exc
    return FeatureTable(tuple(rows))


def _check_tiling(motifs: Sequence[Motif], duration_s: float, tol: float = 1e-9) -> None:
    if not motifs:
        raise ValueError("motif list is empty; a song has at least one motif")
    if abs(motifs[0].onset_s) > tol or abs(motifs[-1].offset_s - duration_s) > tol:
        raise ValueError("motifs do not span [0, duration_s]")
    for a, b in zip(motifs, motifs[1:]):
        if abs(a.offset_s - b.onset_s) > tol:
            raise ValueError("motifs do not tile: gap or overlap between segments")
