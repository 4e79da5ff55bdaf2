"""Synthetic corpus generator with known per-category structural profiles.

Each category profile fixes a song-length range and a motif-duration
distribution. Motif durations are drawn in log2 space, so a profile's (mu,
sigma) maps directly onto the duration-entropy feature's log2 binning and
analytic bin probabilities stay tractable. A jitter model (drop, Gaussian
noise, spurious insertion) turns reference annotations into degraded
predicted ones for evaluator stress tests.

Profile files are JSON:

    {"profiles": [
        {"name": "agricultural",
         "song_len_s": [90.0, 180.0],
         "duration_dist": {"kind": "log2normal", "mu": 1.0, "sigma": 0.6},
         "traits": "high motif count, high duration entropy"},
        {"name": "metronome",
         "song_len_s": [60.0, 60.0],
         "duration_dist": {"kind": "discrete", "choices": [[2.0, 1.0]]}}]}
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from typing import Sequence, Union

import numpy as np

from .annotations import BoundaryRecord, Corpus
from .errors import NumericalError, ParseError, ValidationError

# clamp margin keeping jittered boundaries strictly inside (0, duration)
_EDGE_EPS_S = 1e-6
# block size for duration draws; fixed so a seed always yields the same song
_DRAW_BLOCK = 32
_MAX_DRAWS = 1_000_000


@dataclass(frozen=True)
class Log2NormalDurations:
    """Motif durations 2**X with X ~ Normal(mu, sigma), in log2 seconds."""

    mu: float
    sigma: float

    def __post_init__(self):
        if not (math.isfinite(self.mu) and math.isfinite(self.sigma)):
            raise ValidationError("non-finite log2-normal parameters")
        if self.sigma < 0:
            raise ValidationError(f"negative sigma {self.sigma}")

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return np.exp2(rng.normal(self.mu, self.sigma, n))


@dataclass(frozen=True)
class DiscreteDurations:
    """Motif durations drawn from a weighted finite set."""

    choices: tuple[tuple[float, float], ...]

    def __post_init__(self):
        choices = tuple((float(d), float(w)) for d, w in self.choices)
        object.__setattr__(self, "choices", choices)
        if not choices:
            raise ValidationError("empty discrete duration set")
        for dur, weight in choices:
            if not (math.isfinite(dur) and dur > 0):
                raise ValidationError(f"non-positive duration {dur}")
            if not (math.isfinite(weight) and weight >= 0):
                raise ValidationError(f"bad weight {weight}")
        if sum(w for _, w in choices) <= 0:
            raise ValidationError("discrete duration weights sum to zero")

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        durations = np.array([d for d, _ in self.choices])
        weights = np.array([w for _, w in self.choices])
        return rng.choice(durations, size=n, p=weights / weights.sum())


DurationDist = Union[Log2NormalDurations, DiscreteDurations]


@dataclass(frozen=True)
class CategoryProfile:
    """Structural recipe for one synthetic category."""

    name: str
    duration_dist: DurationDist
    song_len_s: tuple[float, float] = (90.0, 180.0)
    traits: str = ""

    def __post_init__(self):
        if not self.name:
            raise ValidationError("profile name is empty")
        lo, hi = (float(v) for v in self.song_len_s)
        object.__setattr__(self, "song_len_s", (lo, hi))
        if not (math.isfinite(lo) and math.isfinite(hi) and 0 < lo <= hi):
            raise ValidationError(f"bad song length range ({lo}, {hi})")


@dataclass(frozen=True)
class JitterSpec:
    """Degradation model applied to reference boundaries."""

    sigma_s: float = 0.0
    p_drop: float = 0.0
    p_insert: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.sigma_s) and self.sigma_s >= 0):
            raise ValidationError(f"bad jitter sigma {self.sigma_s}")
        for label, p in (("p_drop", self.p_drop), ("p_insert", self.p_insert)):
            if not 0.0 <= p <= 1.0:
                raise ValidationError(f"{label} {p} outside [0, 1]")


def generate_song(
    profile: CategoryProfile,
    rng: np.random.Generator,
    song_id: str,
    source: str = "reference",
) -> BoundaryRecord:
    """Draw one song: length from the profile range, then motif durations
    until the length is filled (the last motif is truncated at song end).

    Boundaries are the duration cumulative sums strictly inside
    (0, duration).
    """
    lo, hi = profile.song_len_s
    duration = float(rng.uniform(lo, hi))
    draws: list[np.ndarray] = []
    total = 0.0
    n_drawn = 0
    while total < duration:
        block = profile.duration_dist.sample(rng, _DRAW_BLOCK)
        draws.append(block)
        total += float(block.sum())
        n_drawn += _DRAW_BLOCK
        if n_drawn > _MAX_DRAWS:
            raise NumericalError(
                f"profile {profile.name!r} failed to fill {duration:.1f} s "
                f"within {_MAX_DRAWS} duration draws"
            )
    cumulative = np.cumsum(np.concatenate(draws))
    boundaries = np.unique(cumulative[cumulative < duration])
    return BoundaryRecord(
        song_id=song_id,
        category=profile.name,
        duration_s=duration,
        boundaries_s=tuple(float(b) for b in boundaries),
        source=source,
    )


def generate_corpus(
    profiles: Sequence[CategoryProfile],
    songs_per_category: int,
    seed: int | np.random.SeedSequence,
) -> Corpus:
    """Deterministic reference corpus: one category per profile.

    Every song gets its own generator spawned from the root seed, so the
    corpus is reproducible and songs could be generated in any order.
    """
    if not profiles:
        raise ValidationError("no profiles")
    if songs_per_category < 1:
        raise ValidationError(f"songs_per_category must be >= 1, got {songs_per_category}")
    children = _seed_sequence(seed).spawn(len(profiles) * songs_per_category)
    records = []
    for i, profile in enumerate(profiles):
        for j in range(songs_per_category):
            rng = np.random.default_rng(children[i * songs_per_category + j])
            records.append(generate_song(profile, rng, f"{profile.name}-{j:03d}"))
    return Corpus(tuple(records))


def jitter_boundaries(
    record: BoundaryRecord, spec: JitterSpec, rng: np.random.Generator
) -> BoundaryRecord:
    """Degrade a reference record into a predicted one.

    Each boundary is independently dropped with p_drop, survivors get
    Gaussian(0, sigma_s) offsets and are clamped strictly inside the song,
    then Binomial(k, p_insert) spurious boundaries land uniformly (k the
    original count). Output is sorted and deduplicated.
    """
    b = np.asarray(record.boundaries_s, dtype=float)
    k = b.size
    kept = b[rng.random(k) >= spec.p_drop]
    noisy = kept + rng.normal(0.0, spec.sigma_s, kept.size)
    n_insert = int(rng.binomial(k, spec.p_insert)) if k else 0
    inserted = rng.uniform(0.0, record.duration_s, n_insert)
    merged = np.concatenate([noisy, inserted])
    lo = _EDGE_EPS_S
    hi = record.duration_s - _EDGE_EPS_S
    merged = np.unique(np.clip(merged, lo, hi))
    return replace(
        record,
        boundaries_s=tuple(float(x) for x in merged),
        source="predicted",
    )


def jitter_corpus(
    corpus: Corpus, spec: JitterSpec, seed: int | np.random.SeedSequence
) -> Corpus:
    """Apply jitter_boundaries to every record, one spawned rng per song."""
    children = _seed_sequence(seed).spawn(len(corpus.records))
    return Corpus(
        tuple(
            jitter_boundaries(record, spec, np.random.default_rng(child))
            for record, child in zip(corpus.records, children)
        )
    )


def _seed_sequence(seed: int | np.random.SeedSequence) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(seed)


def default_profiles() -> tuple[CategoryProfile, ...]:
    """Seven category profiles placed in distinct count/entropy quadrants.

    Motif count tracks mean duration (short motifs pack more into a song)
    and duration entropy tracks sigma. Parameter values are illustrative.
    """
    return (
        CategoryProfile(
            "agricultural",
            Log2NormalDurations(mu=1.0, sigma=0.6),
            traits="high motif count, high duration entropy",
        ),
        CategoryProfile(
            "eosayong",
            Log2NormalDurations(mu=math.log2(6.0), sigma=0.6),
            traits="low motif count, high duration entropy",
        ),
        CategoryProfile(
            "entertainment",
            Log2NormalDurations(mu=1.0, sigma=0.12),
            traits="high motif count, low duration entropy",
        ),
        CategoryProfile(
            "minstrel",
            Log2NormalDurations(mu=math.log2(2.5), sigma=0.15),
            traits="high motif count, low duration entropy",
        ),
        CategoryProfile(
            "lullaby",
            Log2NormalDurations(mu=math.log2(3.5), sigma=0.12),
            traits="moderate motif count, low duration entropy",
        ),
        CategoryProfile(
            "artisan",
            Log2NormalDurations(mu=math.log2(3.0), sigma=0.35),
            traits="average motif count, average duration entropy",
        ),
        CategoryProfile(
            "lament",
            Log2NormalDurations(mu=2.0, sigma=0.45),
            traits="long motifs, mid-high duration entropy",
        ),
    )


def write_profiles(profiles: Sequence[CategoryProfile]) -> str:
    """Serialize profiles to the JSON schema in the module docstring."""
    entries = []
    for p in profiles:
        if isinstance(p.duration_dist, Log2NormalDurations):
            dist = {
                "kind": "log2normal",
                "mu": p.duration_dist.mu,
                "sigma": p.duration_dist.sigma,
            }
        else:
            dist = {
                "kind": "discrete",
                "choices": [list(c) for c in p.duration_dist.choices],
            }
        entries.append(
            {
                "name": p.name,
                "song_len_s": list(p.song_len_s),
                "duration_dist": dist,
                "traits": p.traits,
            }
        )
    return json.dumps({"profiles": entries}, indent=2) + "\n"


def read_profiles(text: str) -> tuple[CategoryProfile, ...]:
    """Parse a profile JSON document."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid profile JSON: {exc}") from exc
    if not isinstance(obj, dict) or not isinstance(obj.get("profiles"), list):
        raise ParseError('profile file must be an object with a "profiles" list')
    profiles = []
    for i, entry in enumerate(obj["profiles"]):
        try:
            profiles.append(_profile_from_obj(entry))
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"profile entry {i}: {exc}") from exc
    if not profiles:
        raise ParseError("profile file lists no profiles")
    return tuple(profiles)


def _profile_from_obj(entry: dict) -> CategoryProfile:
    dist_obj = entry["duration_dist"]
    kind = dist_obj["kind"]
    if kind == "log2normal":
        dist: DurationDist = Log2NormalDurations(
            mu=float(dist_obj["mu"]), sigma=float(dist_obj["sigma"])
        )
    elif kind == "discrete":
        dist = DiscreteDurations(
            choices=tuple((float(d), float(w)) for d, w in dist_obj["choices"])
        )
    else:
        raise ValueError(f"unknown duration_dist kind {kind!r}")
    lo, hi = entry["song_len_s"]
    return CategoryProfile(
        name=str(entry["name"]),
        duration_dist=dist,
        song_len_s=(float(lo), float(hi)),
        traits=str(entry.get("traits", "")),
    )
