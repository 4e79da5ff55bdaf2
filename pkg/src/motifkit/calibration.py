"""Monte-Carlo checks of the statistics stage against synthetic corpora.

Two harnesses: the empirical type-I error rate of the omnibus test under a
null where every pseudo-category shares one duration distribution, and the
omnibus p-values obtained on corpora whose categories sit in distinct
count/entropy quadrants. Both derive one seed per replicate from a root
seed, so results do not depend on execution order.
"""

from __future__ import annotations

import math
from dataclasses import replace

import numpy as np

from .errors import ValidationError
from .features import extract_features
from .manova import manova
from .synthesis import CategoryProfile, Log2NormalDurations, default_profiles, generate_corpus

DEFAULT_ALPHA = 0.05

# One-window songs keep the observation count equal to the song count.
_NULL_BASE = CategoryProfile(
    "null",
    Log2NormalDurations(mu=math.log2(3.0), sigma=0.35),
    song_len_s=(60.0, 60.0),
    traits="shared distribution for type-I error checks",
)


def null_profiles(n_groups: int = 4) -> tuple[CategoryProfile, ...]:
    """n_groups copies of one profile, distinguished only by label."""
    if n_groups < 2:
        raise ValidationError(f"need at least 2 pseudo-groups, got {n_groups}")
    return tuple(replace(_NULL_BASE, name=f"null-{g}") for g in range(n_groups))


def null_rejection_rate(
    n_corpora: int = 1000,
    n_songs: int = 200,
    n_groups: int = 4,
    alpha: float = DEFAULT_ALPHA,
    seed: int = 0,
) -> float:
    """Fraction of null corpora whose omnibus p-value falls below alpha.

    Group labels are assigned by splitting one shared profile into
    n_groups pseudo-categories, so any rejection is a false positive. A
    well-calibrated test keeps the rate near alpha.
    """
    if n_corpora < 1:
        raise ValidationError(f"need at least 1 corpus, got {n_corpora}")
    if n_songs % n_groups:
        raise ValidationError(
            f"{n_songs} songs do not split evenly into {n_groups} groups"
        )
    profiles = null_profiles(n_groups)
    per_group = n_songs // n_groups
    children = np.random.SeedSequence(seed).spawn(n_corpora)
    rejections = 0
    for child in children:
        corpus = generate_corpus(profiles, per_group, child)
        features = extract_features(corpus)
        report = manova(features, posthoc="none")
        if report.p_value < alpha:
            rejections += 1
    return rejections / n_corpora


def separation_p_values(
    n_runs: int = 100, songs_per_category: int = 20, seed: int = 0
) -> tuple[float, ...]:
    """Omnibus p-values over seeded corpora built from the default profiles.

    The default categories occupy distinct count/entropy quadrants, so the
    p-values should be uniformly tiny.
    """
    if n_runs < 1:
        raise ValidationError(f"need at least 1 run, got {n_runs}")
    profiles = default_profiles()
    children = np.random.SeedSequence(seed).spawn(n_runs)
    p_values = []
    for child in children:
        corpus = generate_corpus(profiles, songs_per_category, child)
        features = extract_features(corpus)
        p_values.append(manova(features, posthoc="none").p_value)
    return tuple(p_values)
