"""Corpus data model and JSON Lines interchange for motif-boundary annotations.

A song's annotation stores only its *interior* boundaries: the cut points an
annotator marks between consecutive motifs. Song start and end act as
implicit boundaries, so k stored boundaries delimit k+1 motifs that tile
``[0, duration_s]``.

The interchange format is JSON Lines, one object per song::

    {"song_id": "...", "category": "...", "duration_s": 90.0,
     "boundaries_s": [10.0, 20.5], "source": "reference"}

Unknown keys are ignored with a warning; any invariant violation raises
:class:`~motifkit.errors.ValidationError` naming the song and field.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from typing import Iterable

from .errors import ParseError, ValidationError
from ._fmt import fmt_time

logger = logging.getLogger(__name__)

SOURCES = ("reference", "predicted")

#: Functional categories commonly present in the corpora this toolkit was
#: written for. Documented for reference only; category labels are open
#: strings and are validated solely for non-emptiness.
KNOWN_CATEGORIES = (
    "agricultural",
    "artisan",
    "eosayong",
    "lament",
    "entertainment",
    "minstrel",
    "lullaby",
)

#: Songs at or below this duration are excluded from analysis by default.
DEFAULT_MIN_DURATION_S = 30.0

_RECORD_KEYS = ("song_id", "category", "duration_s", "boundaries_s", "source")


@dataclass(frozen=True)
class Motif:
    """A half-open time interval ``[onset_s, offset_s)`` between boundaries."""

    onset_s: float
    offset_s: float

    def __post_init__(self):
        if not self.offset_s > self.onset_s >= 0.0:
            raise ValidationError(
                f"motif interval ({self.onset_s}, {self.offset_s}) is not a "
                "forward interval with non-negative onset"
            )

    @property
    def duration_s(self) -> float:
        return self.offset_s - self.onset_s


@dataclass(frozen=True)
class BoundaryRecord:
    """One song: identity, functional category, duration, interior boundaries.

    Invariants enforced at construction: non-empty ``song_id`` and
    ``category``, finite positive ``duration_s``, ``boundaries_s`` strictly
    increasing with every value in the open interval ``(0, duration_s)``,
    and ``source`` one of :data:`SOURCES`.
    """

    song_id: str
    category: str
    duration_s: float
    boundaries_s: tuple[float, ...]
    source: str = "reference"

    def __post_init__(self):
        object.__setattr__(self, "duration_s", float(self.duration_s))
        object.__setattr__(
            self, "boundaries_s", tuple(float(b) for b in self.boundaries_s)
        )
        if not isinstance(self.song_id, str) or not self.song_id:
            raise ValidationError("song_id must be a non-empty string", field="song_id")
        sid = self.song_id
        if not isinstance(self.category, str) or not self.category:
            raise ValidationError(
                "category must be a non-empty string", song_id=sid, field="category"
            )
        if not (math.isfinite(self.duration_s) and self.duration_s > 0.0):
            raise ValidationError(
                f"duration_s must be finite and > 0, got {self.duration_s}",
                song_id=sid,
                field="duration_s",
            )
        for b in self.boundaries_s:
            if not math.isfinite(b) or not 0.0 < b < self.duration_s:
                raise ValidationError(
                    f"boundary {b} outside open interval (0, {self.duration_s})",
                    song_id=sid,
                    field="boundaries_s",
                )
        for a, b in zip(self.boundaries_s, self.boundaries_s[1:]):
            if not b > a:
                raise ValidationError(
                    f"boundaries not strictly increasing at {a} -> {b}",
                    song_id=sid,
                    field="boundaries_s",
                )
        if self.source not in SOURCES:
            raise ValidationError(
                f"source must be one of {SOURCES}, got {self.source!r}",
                song_id=sid,
                field="source",
            )

    def motifs(self) -> list[Motif]:
        """The motifs delimited by this record's boundaries."""
        return motifs_from_boundaries(self.boundaries_s, self.duration_s)


@dataclass(frozen=True)
class Corpus:
    """An immutable collection of records; song_id unique within a source."""

    records: tuple[BoundaryRecord, ...]

    def __post_init__(self):
        object.__setattr__(self, "records", tuple(self.records))
        seen: set[tuple[str, str]] = set()
        for rec in self.records:
            key = (rec.source, rec.song_id)
            if key in seen:
                raise ValidationError(
                    f"duplicate song_id within source {rec.source!r}",
                    song_id=rec.song_id,
                    field="song_id",
                )
            seen.add(key)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    @property
    def categories(self) -> tuple[str, ...]:
        """Distinct categories present, sorted."""
        return tuple(sorted({r.category for r in self.records}))

    def by_id(self) -> dict[str, BoundaryRecord]:
        """Map song_id -> record. Requires song_id unique across the corpus."""
        out: dict[str, BoundaryRecord] = {}
        for rec in self.records:
            if rec.song_id in out:
                raise ValidationError(
                    "song_id appears under more than one source; "
                    "cannot build an unambiguous id map",
                    song_id=rec.song_id,
                    field="song_id",
                )
            out[rec.song_id] = rec
        return out


def motifs_from_boundaries(
    boundaries_s: Iterable[float], duration_s: float
) -> list[Motif]:
    """Derive the motif tiling of ``[0, duration_s]`` from interior boundaries.

    k boundaries yield k+1 motifs; an empty boundary list yields a single
    motif spanning the whole song.
    """
    edges = [0.0, *boundaries_s, float(duration_s)]
    return [Motif(a, b) for a, b in zip(edges, edges[1:])]


def parse_annotations(
    stream: str | Iterable[str],
    min_duration_s: float = DEFAULT_MIN_DURATION_S,
) -> Corpus:
    """Parse JSON Lines annotations into a validated :class:`Corpus`.

    ``stream`` may be a string or any iterable of lines (e.g. an open file).
    Records with ``duration_s <= min_duration_s`` are rejected; pass
    ``min_duration_s=0`` to admit arbitrarily short songs.

    Raises :class:`ParseError` (with line number) for undecodable lines and
    :class:`ValidationError` (naming song and field) for invariant
    violations. Blank lines are skipped; unknown keys are ignored with a
    warning.
    """
    lines = stream.splitlines() if isinstance(stream, str) else stream
    records: list[BoundaryRecord] = []
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", line_no=line_no) from exc
        if not isinstance(obj, dict):
            raise ParseError(
                f"expected a JSON object, got {type(obj).__name__}", line_no=line_no
            )
        records.append(_record_from_obj(obj, line_no, min_duration_s))
    return Corpus(tuple(records))


def write_annotations(corpus: Corpus) -> str:
    """Serialize a corpus to JSON Lines.

    Key order is fixed and times are written with
    :func:`~motifkit._fmt.fmt_time`, so output is byte-deterministic and
    ``parse_annotations(write_annotations(c))`` reproduces ``c`` exactly.
    """
    lines = []
    for rec in corpus:
        bounds = ",".join(fmt_time(b) for b in rec.boundaries_s)
        lines.append(
            "{"
            f'"song_id":{json.dumps(rec.song_id, ensure_ascii=False)},'
            f'"category":{json.dumps(rec.category, ensure_ascii=False)},'
            f'"duration_s":{fmt_time(rec.duration_s)},'
            f'"boundaries_s":[{bounds}],'
            f'"source":{json.dumps(rec.source, ensure_ascii=False)}'
            "}\n"
        )
    return "".join(lines)


def _record_from_obj(
    obj: dict, line_no: int, min_duration_s: float
) -> BoundaryRecord:
    song_id = obj.get("song_id")
    sid = song_id if isinstance(song_id, str) else None
    unknown = sorted(set(obj) - set(_RECORD_KEYS))
    if unknown:
        logger.warning("line %d: ignoring unknown keys %s", line_no, unknown)
    for key in _RECORD_KEYS:
        if key not in obj:
            raise ValidationError(f"missing key {key!r}", song_id=sid, field=key)
    duration = _as_number(obj["duration_s"], sid, "duration_s")
    raw_bounds = obj["boundaries_s"]
    if not isinstance(raw_bounds, list):
        raise ValidationError(
            "boundaries_s must be a list of numbers", song_id=sid, field="boundaries_s"
        )
    bounds = tuple(_as_number(b, sid, "boundaries_s") for b in raw_bounds)
    for key in ("song_id", "category", "source"):
        if not isinstance(obj[key], str):
            raise ValidationError(
                f"expected a string, got {obj[key]!r}", song_id=sid, field=key
            )
    record = BoundaryRecord(
        song_id=obj["song_id"],
        category=obj["category"],
        duration_s=duration,
        boundaries_s=bounds,
        source=obj["source"],
    )
    if min_duration_s > 0 and record.duration_s <= min_duration_s:
        raise ValidationError(
            f"duration_s {record.duration_s} not above the admission "
            f"threshold of {min_duration_s} s",
            song_id=record.song_id,
            field="duration_s",
        )
    return record


def _as_number(value, song_id: str | None, field: str) -> float:
    # bool is an int subclass; a boolean duration or boundary is never valid
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(
            f"expected a number, got {value!r}", song_id=song_id, field=field
        )
    return float(value)
