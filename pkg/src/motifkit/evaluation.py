"""Tolerance-based scoring of predicted boundaries against references.

Matching is maximum-cardinality, one-to-one, and order-preserving: because
both boundary lists are sorted and the compatibility window is symmetric,
any crossing matching can be uncrossed without losing pairs, so a linear
greedy sweep attains the global maximum (verified against brute force in
the test suite).

Per-song scores aggregate to groups either *macro* (mean of per-song
metrics, the default) or *micro* (pooled hit counts).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Literal, Sequence

import numpy as np

from .annotations import BoundaryRecord, Corpus
from .errors import ValidationError
from ._fmt import csv_field

DEFAULT_TOLERANCE_S = 0.1
DEFAULT_FOLDS = 10

GroupBy = Literal["none", "category", "fold"]
Aggregate = Literal["macro", "micro"]


@dataclass(frozen=True)
class EvalMetrics:
    """Boundary-detection counts and ratios for one song."""

    hits: int
    n_ref: int
    n_pred: int
    precision: float
    recall: float
    f1: float

    @classmethod
    def from_counts(cls, hits: int, n_ref: int, n_pred: int) -> "EvalMetrics":
        """Build metrics from counts.

        Conventions for empty sides: with no predictions, precision is 1
        when there is nothing to find and 0 otherwise; recall symmetrically.
        F1 is 0 whenever precision + recall is 0.
        """
        if hits < 0 or hits > min(n_ref, n_pred):
            raise ValueError(f"inconsistent counts: hits={hits}, n_ref={n_ref}, n_pred={n_pred}")
        precision = hits / n_pred if n_pred > 0 else (1.0 if n_ref == 0 else 0.0)
        recall = hits / n_ref if n_ref > 0 else (1.0 if n_pred == 0 else 0.0)
        f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
        return cls(hits, n_ref, n_pred, precision, recall, f1)


@dataclass(frozen=True)
class GroupSummary:
    """Aggregated metrics for one group of songs."""

    group: str
    n_songs: int
    mean_precision: float
    mean_recall: float
    mean_f1: float


@dataclass(frozen=True)
class FoldAssignment:
    """A stratified split: song_id -> fold index in [0, k)."""

    k: int
    assignment: dict[str, int]


def match_boundaries(
    ref: Sequence[float], pred: Sequence[float], tolerance_s: float
) -> list[tuple[int, int]]:
    """Maximum one-to-one matching of two sorted boundary lists.

    Returns index pairs ``(i, j)`` with ``|ref[i] - pred[j]| <= tolerance_s``
    (closed interval: a gap exactly equal to the tolerance counts). The
    matching is non-crossing and of maximum cardinality.
    """
    if tolerance_s < 0:
        raise ValueError("tolerance_s must be >= 0")
    _require_sorted(ref, "ref")
    _require_sorted(pred, "pred")
    pairs: list[tuple[int, int]] = []
    i = j = 0
    while i < len(ref) and j < len(pred):
        if abs(ref[i] - pred[j]) <= tolerance_s:
            pairs.append((i, j))
            i += 1
            j += 1
        elif ref[i] < pred[j]:
            i += 1
        else:
            j += 1
    return pairs


def evaluate_song(
    ref_record: BoundaryRecord,
    pred_record: BoundaryRecord,
    tolerance_s: float = DEFAULT_TOLERANCE_S,
) -> EvalMetrics:
    """Score one song's predicted boundaries against its reference.

    Only interior boundaries are compared; the implicit song start/end are
    excluded so trivially correct endpoints cannot inflate the score.
    """
    if ref_record.song_id != pred_record.song_id:
        raise ValidationError(
            f"record song_ids differ: {ref_record.song_id!r} vs {pred_record.song_id!r}",
            song_id=ref_record.song_id,
            field="song_id",
        )
    pairs = match_boundaries(
        ref_record.boundaries_s, pred_record.boundaries_s, tolerance_s
    )
    return EvalMetrics.from_counts(
        hits=len(pairs),
        n_ref=len(ref_record.boundaries_s),
        n_pred=len(pred_record.boundaries_s),
    )


def evaluate_corpus(
    ref: Corpus,
    pred: Corpus,
    tolerance_s: float = DEFAULT_TOLERANCE_S,
    group_by: GroupBy = "none",
    folds: FoldAssignment | None = None,
    aggregate: Aggregate = "macro",
) -> list[GroupSummary]:
    """Score every song and aggregate within groups.

    The reference and prediction corpora must cover exactly the same songs;
    a song present on one side only is reported as an error naming it.
    ``group_by="fold"`` requires a :class:`FoldAssignment` covering all
    songs. Output order is deterministic: groups sorted by name (folds by
    index).
    """
    ref_by_id = ref.by_id()
    pred_by_id = pred.by_id()
    for sid in pred_by_id:
        if sid not in ref_by_id:
            raise ValidationError("no reference record for song", song_id=sid)
    for sid in ref_by_id:
        if sid not in pred_by_id:
            raise ValidationError("no predicted record for song", song_id=sid)

    per_song: dict[str, EvalMetrics] = {
        sid: evaluate_song(ref_by_id[sid], pred_by_id[sid], tolerance_s)
        for sid in ref_by_id
    }

    groups: dict[str, list[str]] = {}
    if group_by == "none":
        groups["all"] = list(per_song)
    elif group_by == "category":
        for sid in per_song:
            groups.setdefault(ref_by_id[sid].category, []).append(sid)
    elif group_by == "fold":
        if folds is None:
            raise ValueError("group_by='fold' requires a FoldAssignment")
        for sid in per_song:
            if sid not in folds.assignment:
                raise ValidationError("song missing from fold assignment", song_id=sid)
            groups.setdefault(f"fold-{folds.assignment[sid]}", []).append(sid)
    else:
        raise ValueError(f"unknown group_by {group_by!r}")

    if group_by == "fold":
        ordered = sorted(groups, key=lambda g: int(g.split("-")[1]))
    else:
        ordered = sorted(groups)

    summaries = []
    for name in ordered:
        members = [per_song[sid] for sid in groups[name]]
        summaries.append(_summarize(name, members, aggregate))
    return summaries


def _summarize(name: str, members: list[EvalMetrics], aggregate: Aggregate) -> GroupSummary:
    if aggregate == "macro":
        n = len(members)
        return GroupSummary(
            group=name,
            n_songs=n,
            mean_precision=sum(m.precision for m in members) / n,
            mean_recall=sum(m.recall for m in members) / n,
            mean_f1=sum(m.f1 for m in members) / n,
        )
    if aggregate == "micro":
        pooled = EvalMetrics.from_counts(
            hits=sum(m.hits for m in members),
            n_ref=sum(m.n_ref for m in members),
            n_pred=sum(m.n_pred for m in members),
        )
        return GroupSummary(
            group=name,
            n_songs=len(members),
            mean_precision=pooled.precision,
            mean_recall=pooled.recall,
            mean_f1=pooled.f1,
        )
    raise ValueError(f"unknown aggregate {aggregate!r}")


def stratified_folds(corpus: Corpus, k: int, seed: int) -> FoldAssignment:
    """Assign songs to k folds, stratified by category.

    Deterministic under (corpus order, seed). Within every category the
    fold sizes differ by at most one; categories are dealt consecutively so
    overall fold sizes stay balanced as well.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    if k > len(corpus):
        raise ValidationError(f"cannot split {len(corpus)} songs into {k} folds")
    by_category: dict[str, list[str]] = {}
    for rec in corpus:
        by_category.setdefault(rec.category, []).append(rec.song_id)

    rng = np.random.default_rng(seed)
    assignment: dict[str, int] = {}
    start = 0
    for ids in by_category.values():
        order = rng.permutation(len(ids))
        for offset, idx in enumerate(order):
            assignment[ids[idx]] = (start + offset) % k
        start = (start + len(ids)) % k
    return FoldAssignment(k=k, assignment=assignment)


def report_csv(summaries: Iterable[GroupSummary]) -> str:
    """Render group summaries as the evaluation CSV contract."""
    lines = ["group,n_songs,mean_precision,mean_recall,mean_f1"]
    for s in summaries:
        lines.append(
            f"{csv_field(s.group)},{s.n_songs},"
            f"{s.mean_precision!r},{s.mean_recall!r},{s.mean_f1!r}"
        )
    return "\n".join(lines) + "\n"


def _require_sorted(values: Sequence[float], name: str) -> None:
    for a, b in zip(values, values[1:]):
        if not b > a:
            raise ValueError(f"{name} boundaries must be strictly increasing")
