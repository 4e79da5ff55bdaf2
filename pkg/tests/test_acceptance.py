"""Acceptance gate: one test per headline behavioral guarantee.

Each test prints a single ``[acceptance] <name>: PASS``/``FAIL`` line (run
pytest with ``-s`` to see them on a green run; on failure the line shows up
in the captured output). The criteria pin the numeric claims the package
stands behind; the final test states the reference results it deliberately
does not claim.
"""

import math
import subprocess
import sys
import time

import numpy as np
import pytest

from motifkit import (
    CategoryProfile,
    JitterSpec,
    Log2NormalDurations,
    Observation,
    duration_entropy,
    evaluate_corpus,
    f_survival,
    generate_corpus,
    hotelling_t2,
    jitter_corpus,
    manova_observations,
    match_boundaries,
    null_rejection_rate,
    rao_f,
    separation_p_values,
)

from test_evaluation import brute_force_matching_size


def _verdict(name, ok, detail=""):
    print(f"[acceptance] {name}: {'PASS' if ok else 'FAIL'}", flush=True)
    assert ok, f"{name}: {detail}"


def test_entropy_exactness():
    flat = duration_entropy([2.0, 2.0, 2.0])
    four = duration_entropy([1.0, 2.0, 4.0, 8.0])
    mixed = duration_entropy([1.0, 1.1, 2.0])
    ok = flat == 0.0 and four == 2.0 and abs(mixed - 0.9183) <= 1e-4
    _verdict("entropy-exactness", ok, f"got {flat}, {four}, {mixed}")


def test_wilks_to_f_reproduction():
    f_stat, df1, df2 = rao_f(0.68, 2, 8, 775)
    p = f_survival(f_stat, df1, df2)
    ok = (df1, df2) == (14, 1532.0) and 23.1 <= f_stat <= 23.6 and p < 0.001

    # inverse search: which lambda reproduces F = 23.52 at these df?
    lo, hi = 0.5, 0.9
    for _ in range(80):
        mid = (lo + hi) / 2.0
        if rao_f(mid, 2, 8, 775)[0] > 23.52:
            lo = mid
        else:
            hi = mid
    lam_star = (lo + hi) / 2.0
    ok = ok and 0.675 <= lam_star <= 0.685
    _verdict(
        "wilks-to-f-reproduction",
        ok,
        f"df=({df1},{df2}) F={f_stat} p={p} lambda*={lam_star}",
    )


def test_two_group_equivalence():
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(500):
        n_a, n_b = rng.integers(5, 31, size=2)
        a = rng.normal(size=(n_a, 2))
        b = rng.normal(loc=rng.normal(scale=0.5, size=2), size=(n_b, 2))
        obs = [Observation(tuple(row), "a") for row in a]
        obs += [Observation(tuple(row), "b") for row in b]
        report = manova_observations(obs, posthoc="none")
        p_hot = hotelling_t2(a, b)[4]
        worst = max(worst, abs(report.p_value - p_hot))
    _verdict("two-group-equivalence", worst <= 1e-9, f"max |p diff| = {worst}")


def test_matching_optimality():
    rng = np.random.default_rng(7)
    for trial in range(1000):
        n_ref, n_pred = rng.integers(0, 9, size=2)
        ref = sorted(rng.uniform(0, 20, size=n_ref).tolist())
        pred = sorted(rng.uniform(0, 20, size=n_pred).tolist())
        tol = float(rng.uniform(0.05, 3.0))
        got = len(match_boundaries(ref, pred, tol))
        want = brute_force_matching_size(tuple(ref), tuple(pred), tol)
        if got != want:
            _verdict(
                "matching-optimality",
                False,
                f"trial {trial}: {got} != {want} for {ref} / {pred} tol {tol}",
            )
    _verdict("matching-optimality", True)


def test_null_calibration():
    start = time.monotonic()
    rate = null_rejection_rate(n_corpora=1000, n_songs=200, seed=0)
    elapsed = time.monotonic() - start
    ok = 0.03 <= rate <= 0.07 and elapsed < 120.0
    _verdict("null-calibration", ok, f"rate={rate} elapsed={elapsed:.1f}s")


def test_separation_power():
    p_values = separation_p_values(n_runs=100, songs_per_category=20, seed=0)
    n_sep = sum(p < 0.001 for p in p_values)
    _verdict("separation-power", n_sep >= 95, f"{n_sep}/100 runs below 0.001")


def test_evaluator_analytic_recall():
    profile = CategoryProfile("analytic", Log2NormalDurations(mu=1.0, sigma=0.5))
    ref = generate_corpus([profile], 1000, seed=0)
    pred = jitter_corpus(ref, JitterSpec(sigma_s=0.05, p_drop=0.1), seed=1)
    summary = evaluate_corpus(ref, pred, tolerance_s=0.1)[0]
    # survive the drop (0.9), then land within tolerance (P(|N(0,0.05)| <= 0.1))
    expected = 0.9 * math.erf(0.1 / (0.05 * math.sqrt(2.0)))
    diff = abs(summary.mean_recall - expected)
    _verdict(
        "evaluator-analytic-recall",
        diff <= 0.02,
        f"recall={summary.mean_recall} expected={expected} diff={diff}",
    )


def test_end_to_end_determinism(tmp_path):
    def pipeline(workdir):
        workdir.mkdir()
        run = lambda *args: subprocess.run(
            [sys.executable, "-m", "motifkit", *args],
            cwd=workdir,
            capture_output=True,
            text=True,
            check=True,
        )
        run(
            "simulate", "--songs-per-category", "5", "--seed", "42",
            "--jitter", "0.05,0.1,0.02", "--out", "ref.jsonl,pred.jsonl",
        )
        run("features", "--ann", "ref.jsonl", "--out", "features.csv")
        run("manova", "--features", "features.csv", "--format", "json",
            "--out", "manova.json")
        run("plot-data", "--features", "features.csv", "--out", "plot.csv")
        names = ["ref.jsonl", "pred.jsonl", "features.csv", "manova.json", "plot.csv"]
        return {name: (workdir / name).read_bytes() for name in names}

    first = pipeline(tmp_path / "run1")
    second = pipeline(tmp_path / "run2")
    differing = [name for name in first if first[name] != second[name]]
    _verdict("end-to-end-determinism", not differing, f"differs: {differing}")


def test_reference_results_out_of_scope():
    statement = (
        "The reference results this toolkit accompanies (boundary F1 = 0.820 "
        "overall, 0.710-0.880 per genre, and Wilks lambda = 0.68 on the real "
        "corpus) were produced from a private annotated audio collection with "
        "GPU fine-tuning. Neither input is available here, so those numbers "
        "are not reproduced; the synthetic-corpus checks above (calibration, "
        "separation power, analytic recall) stand in for them."
    )
    print(statement)
    for figure in ("0.820", "0.710", "0.880", "0.68"):
        assert figure in statement
    _verdict("reference-results-out-of-scope", True)
