"""One-way MANOVA: Wilks' lambda, Rao's F, and pairwise Hotelling post-hocs.

The omnibus test forms within- and between-group scatter matrices, takes
Wilks' lambda as the determinant ratio det(W) / det(W + B), maps it to an F
statistic through Rao's approximation (exact for two response variables, the
case this toolkit cares about), and converts to a p-value with the in-repo
incomplete beta machinery. Post-hoc comparisons are pairwise Hotelling T2
tests across all group pairs with Holm step-down adjustment.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .errors import NumericalError, ValidationError
from .features import FeatureTable
from .special import f_survival
from ._fmt import csv_field, fmt_num

FEATURE_VARS = ("motif_count", "duration_entropy_bits")

_OMNIBUS_HEADER = "n_vars,n_groups,n_obs,wilks_lambda,f_stat,df1,df2,p_value"
_POSTHOC_HEADER = "group_a,group_b,t2,f,df1,df2,p_raw,p_holm"


@dataclass(frozen=True)
class Observation:
    """One multivariate observation with its group label."""

    values: tuple[float, ...]
    group: str

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if not self.values:
            raise ValidationError("observation has no values")
        if not all(math.isfinite(v) for v in self.values):
            raise ValidationError(f"non-finite observation values {self.values}")
        if not self.group:
            raise ValidationError("observation group label is empty")


@dataclass(frozen=True)
class GroupStats:
    group: str
    n: int
    mean: tuple[float, ...]


@dataclass(frozen=True)
class PosthocResult:
    group_a: str
    group_b: str
    t2: float
    f_stat: float
    df1: int
    df2: int
    p_raw: float
    p_holm: float


@dataclass(frozen=True)
class ManovaReport:
    """Everything the omnibus and post-hoc stages produced."""

    n_vars: int
    n_groups: int
    n_obs: int
    var_names: tuple[str, ...]
    within: tuple[tuple[float, ...], ...]
    between: tuple[tuple[float, ...], ...]
    wilks_lambda: float
    f_stat: float
    df1: int
    df2: float
    p_value: float
    group_means: tuple[GroupStats, ...]
    posthoc: tuple[PosthocResult, ...]
    notes: tuple[str, ...] = ()


def scatter_matrices(observations: Iterable[Observation]) -> tuple[np.ndarray, np.ndarray]:
    """Within-group (W) and between-group (B) scatter matrices.

    W sums squared deviations about each group mean, B sums group-size
    weighted squared deviations of group means about the grand mean, so
    W + B equals the total scatter about the grand mean.
    """
    obs = list(observations)
    if not obs:
        raise ValidationError("no observations")
    p = len(obs[0].values)
    if any(len(o.values) != p for o in obs):
        raise ValidationError("observations have inconsistent dimensionality")
    labels = [o.group for o in obs]
    groups = sorted(set(labels))
    n = len(obs)
    if len(groups) < 2:
        raise ValidationError("need at least 2 groups")
    if n <= len(groups):
        raise ValidationError(
            f"{n} observations in {len(groups)} groups leave no "
            "within-group degrees of freedom"
        )
    x = np.array([o.values for o in obs], dtype=float)
    grand = x.mean(axis=0)
    within = np.zeros((p, p))
    between = np.zeros((p, p))
    for name in groups:
        xg = x[[lab == name for lab in labels]]
        mean_g = xg.mean(axis=0)
        centered = xg - mean_g
        within += centered.T @ centered
        dm = mean_g - grand
        between += len(xg) * np.outer(dm, dm)
    return within, between


def wilks_lambda(within: np.ndarray, between: np.ndarray) -> float:
    """Wilks' lambda: det(W) / det(W + B), in [0, 1]."""
    within = np.asarray(within, dtype=float)
    total = within + np.asarray(between, dtype=float)
    det_total = _det(total)
    scale = max(float(np.linalg.norm(total)), 1e-30) ** total.shape[0]
    if abs(det_total) <= 1e-13 * scale:
        raise NumericalError(
            "total scatter matrix is singular; response variables are collinear"
        )
    lam = _det(within) / det_total
    return min(max(lam, 0.0), 1.0)


def rao_f(
    wilks: float, n_vars: int, n_groups: int, n_obs: int
) -> tuple[float, int, float]:
    """Rao's F approximation for Wilks' lambda: returns (F, df1, df2).

    Exact for n_vars <= 2 or n_groups <= 3. The exponent parameter s falls
    back to 1 when its denominator is not positive (the two-group,
    two-variable corner, where the mapping is exact anyway).
    """
    if not 0.0 < wilks <= 1.0:
        raise NumericalError(f"wilks lambda {wilks} outside (0, 1]")
    if n_groups < 2 or n_obs <= n_groups:
        raise ValidationError("need n_obs > n_groups >= 2")
    nu_h = n_groups - 1
    nu_e = n_obs - n_groups
    denom = n_vars * n_vars + nu_h * nu_h - 5
    if denom > 0:
        s = math.sqrt((n_vars * n_vars * nu_h * nu_h - 4) / denom)
    else:
        s = 1.0
    m = nu_e + nu_h - (n_vars + nu_h + 1) / 2.0
    df1 = n_vars * nu_h
    df2 = m * s - df1 / 2.0 + 1.0
    if df2 <= 0:
        raise NumericalError(f"non-positive denominator df {df2}; too few observations")
    root = wilks ** (1.0 / s)
    f_stat = (1.0 - root) / root * (df2 / df1)
    return f_stat, df1, df2


def hotelling_t2(
    group_a: Sequence[Sequence[float]], group_b: Sequence[Sequence[float]]
) -> tuple[float, float, int, int, float]:
    """Two-sample Hotelling T2 test; returns (T2, F, df1, df2, p)."""
    a = np.asarray(group_a, dtype=float)
    b = np.asarray(group_b, dtype=float)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[1]:
        raise ValidationError("groups must be 2-d with matching variable count")
    n_a, p = a.shape
    n_b = b.shape[0]
    n = n_a + n_b
    if n <= p + 1:
        raise ValidationError(f"{n} observations cannot support {p} variables")
    ca = a - a.mean(axis=0)
    cb = b - b.mean(axis=0)
    pooled = (ca.T @ ca + cb.T @ cb) / (n - 2)
    scale = max(float(np.linalg.norm(pooled)), 1e-30) ** p
    if abs(_det(pooled)) <= 1e-13 * scale:
        raise NumericalError("singular pooled covariance in Hotelling T2")
    diff = a.mean(axis=0) - b.mean(axis=0)
    t2 = float(n_a * n_b / n * diff @ np.linalg.solve(pooled, diff))
    t2 = max(t2, 0.0)
    df1 = p
    df2 = n - p - 1
    f_stat = t2 * df2 / (p * (n - 2))
    return t2, f_stat, df1, df2, f_survival(f_stat, df1, df2)


def holm_adjust(p_values: Sequence[float]) -> list[float]:
    """Holm step-down adjustment, returned in input order."""
    for p in p_values:
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"p-value {p} outside [0, 1]")
    m = len(p_values)
    order = sorted(range(m), key=lambda i: p_values[i])
    adjusted = [0.0] * m
    running = 0.0
    for rank, idx in enumerate(order):
        running = max(running, (m - rank) * p_values[idx])
        adjusted[idx] = min(1.0, running)
    return adjusted


def manova_observations(
    observations: Iterable[Observation],
    var_names: Sequence[str] = FEATURE_VARS,
    posthoc: str = "holm",
    expect_groups: int | None = None,
) -> ManovaReport:
    """Run the full omnibus + post-hoc analysis on labelled observations."""
    obs = list(observations)
    if not obs:
        raise ValidationError("no observations")
    p = len(obs[0].values)
    groups = sorted({o.group for o in obs})
    g = len(groups)
    n = len(obs)
    sizes = {name: sum(1 for o in obs if o.group == name) for name in groups}
    small = [name for name in groups if sizes[name] < 2]
    if small:
        raise ValidationError(
            f"groups below the 2-observation minimum: {', '.join(small)}"
        )
    if g < 2:
        raise ValidationError("need at least 2 groups")
    if n <= g + p:
        raise ValidationError(
            f"need more than {g + p} observations for {g} groups and {p} variables, got {n}"
        )
    if posthoc not in ("holm", "none"):
        raise ValueError(f"unknown posthoc adjustment {posthoc!r}")

    within, between = scatter_matrices(obs)
    lam = wilks_lambda(within, between)
    f_stat, df1, df2 = rao_f(lam, p, g, n)
    p_value = f_survival(f_stat, df1, df2)

    by_group = {
        name: np.array([o.values for o in obs if o.group == name], dtype=float)
        for name in groups
    }
    means = tuple(
        GroupStats(name, sizes[name], tuple(float(v) for v in by_group[name].mean(axis=0)))
        for name in groups
    )

    pairs = list(combinations(groups, 2))
    raws: list[tuple[str, str, float, float, int, int, float]] = []
    for a_name, b_name in pairs:
        t2, pair_f, pair_df1, pair_df2, pair_p = hotelling_t2(
            by_group[a_name], by_group[b_name]
        )
        raws.append((a_name, b_name, t2, pair_f, pair_df1, pair_df2, pair_p))
    if posthoc == "holm":
        adjusted = holm_adjust([r[6] for r in raws])
    else:
        adjusted = [r[6] for r in raws]
    posthoc_rows = tuple(
        PosthocResult(a, b, t2, pf, pd1, pd2, praw, padj)
        for (a, b, t2, pf, pd1, pd2, praw), padj in zip(raws, adjusted)
    )

    notes = ()
    if expect_groups is not None and g != expect_groups:
        notes = (f"data contains {g} groups where {expect_groups} were expected",)

    return ManovaReport(
        n_vars=p,
        n_groups=g,
        n_obs=n,
        var_names=tuple(var_names),
        within=_matrix_tuple(within),
        between=_matrix_tuple(between),
        wilks_lambda=lam,
        f_stat=f_stat,
        df1=df1,
        df2=df2,
        p_value=p_value,
        group_means=means,
        posthoc=posthoc_rows,
        notes=notes,
    )


def manova(
    features: FeatureTable,
    per_song: bool = False,
    posthoc: str = "holm",
    expect_groups: int | None = None,
) -> ManovaReport:
    """MANOVA of (motif_count, duration_entropy) against category.

    The observation unit is one window row; with ``per_song`` the windows of
    each song are averaged into a single observation first.
    """
    if per_song:
        acc: dict[str, tuple[str, list[float], list[float]]] = {}
        for row in features:
            entry = acc.setdefault(row.song_id, (row.category, [], []))
            entry[1].append(row.motif_count)
            entry[2].append(row.duration_entropy_bits)
        observations = [
            Observation(
                (sum(counts) / len(counts), sum(ents) / len(ents)), category
            )
            for category, counts, ents in (acc[sid] for sid in sorted(acc))
        ]
    else:
        observations = [
            Observation((row.motif_count, row.duration_entropy_bits), row.category)
            for row in features
        ]
    return manova_observations(
        observations, var_names=FEATURE_VARS, posthoc=posthoc, expect_groups=expect_groups
    )


def report_text(report: ManovaReport) -> str:
    """Human-readable summary of a ManovaReport."""
    lines = [
        "one-way MANOVA",
        f"  variables ({report.n_vars}): {', '.join(report.var_names)}",
        f"  observations: {report.n_obs}   groups: {report.n_groups}",
        "  group means:",
    ]
    for gs in report.group_means:
        vals = "  ".join(
            f"{name}={value:.6g}" for name, value in zip(report.var_names, gs.mean)
        )
        lines.append(f"    {gs.group} (n={gs.n}): {vals}")
    lines.append(f"  within scatter W: {_matrix_text(report.within)}")
    lines.append(f"  between scatter B: {_matrix_text(report.between)}")
    lines.append(f"  Wilks lambda: {report.wilks_lambda:.6g}")
    lines.append(
        f"  Rao F({fmt_num(report.df1)}, {fmt_num(report.df2)}) = {report.f_stat:.6g}"
    )
    lines.append(f"  p-value: {report.p_value:.6g}")
    lines.append("  post-hoc pairwise Hotelling T2 (Holm-adjusted):")
    for ph in report.posthoc:
        lines.append(
            f"    {ph.group_a} vs {ph.group_b}: T2={ph.t2:.6g} "
            f"F({ph.df1}, {ph.df2})={ph.f_stat:.6g} "
            f"p_raw={ph.p_raw:.6g} p_holm={ph.p_holm:.6g}"
        )
    for note in report.notes:
        lines.append(f"  note: {note}")
    return "\n".join(lines) + "\n"


def report_json(report: ManovaReport) -> str:
    """Machine-readable JSON rendering of a ManovaReport."""
    payload = {
        "n_vars": report.n_vars,
        "n_groups": report.n_groups,
        "n_obs": report.n_obs,
        "var_names": list(report.var_names),
        "within": [list(row) for row in report.within],
        "between": [list(row) for row in report.between],
        "wilks_lambda": report.wilks_lambda,
        "f_stat": report.f_stat,
        "df1": report.df1,
        "df2": report.df2,
        "p_value": report.p_value,
        "group_means": [
            {"group": gs.group, "n": gs.n, "mean": list(gs.mean)}
            for gs in report.group_means
        ],
        "posthoc": [
            {
                "group_a": ph.group_a,
                "group_b": ph.group_b,
                "t2": ph.t2,
                "f": ph.f_stat,
                "df1": ph.df1,
                "df2": ph.df2,
                "p_raw": ph.p_raw,
                "p_holm": ph.p_holm,
            }
            for ph in report.posthoc
        ],
        "notes": list(report.notes),
    }
    return json.dumps(payload, sort_keys=True) + "\n"


def omnibus_csv(report: ManovaReport) -> str:
    """One-row CSV with the omnibus statistics."""
    return (
        _OMNIBUS_HEADER
        + "\n"
        + f"{report.n_vars},{report.n_groups},{report.n_obs},"
        f"{report.wilks_lambda!r},{report.f_stat!r},"
        f"{fmt_num(report.df1)},{fmt_num(report.df2)},{report.p_value!r}\n"
    )


def posthoc_csv(report: ManovaReport) -> str:
    """CSV table of the pairwise post-hoc tests."""
    lines = [_POSTHOC_HEADER]
    for ph in report.posthoc:
        lines.append(
            f"{csv_field(ph.group_a)},{csv_field(ph.group_b)},"
            f"{ph.t2!r},{ph.f_stat!r},{ph.df1},{ph.df2},"
            f"{ph.p_raw!r},{ph.p_holm!r}"
        )
    return "\n".join(lines) + "\n"


def _det(matrix: np.ndarray) -> float:
    p = matrix.shape[0]
    if p == 1:
        return float(matrix[0, 0])
    if p == 2:
        return float(matrix[0, 0] * matrix[1, 1] - matrix[0, 1] * matrix[1, 0])
    return float(np.linalg.det(matrix))


def _matrix_tuple(matrix: np.ndarray) -> tuple[tuple[float, ...], ...]:
    return tuple(tuple(float(v) for v in row) for row in matrix)


def _matrix_text(matrix: tuple[tuple[float, ...], ...]) -> str:
    rows = ["[" + ", ".join(f"{v:.6g}" for v in row) + "]" for row in matrix]
    return "[" + "; ".join(rows) + "]"
