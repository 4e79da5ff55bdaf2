import json
import math

import mpmath
import numpy as np
import pytest

from motifkit import (
    FeatureTable,
    NumericalError,
    Observation,
    ValidationError,
    WindowFeature,
    f_survival,
    holm_adjust,
    hotelling_t2,
    manova,
    manova_observations,
    omnibus_csv,
    posthoc_csv,
    rao_f,
    report_json,
    report_text,
    scatter_matrices,
    wilks_lambda,
)

mpmath.mp.dps = 50

# six points in two groups with fraction-exact scatter matrices:
# W = [[4, 1], [1, 4/3]], B = [[24, 2], [2, 1/6]], lambda = 13/99
HAND_A = [(0.0, 0.0), (1.0, 1.0), (2.0, 0.0)]
HAND_B = [(4.0, 0.0), (5.0, 1.0), (6.0, 1.0)]


def obs_from_groups(*groups):
    out = []
    for idx, points in enumerate(groups):
        for p in points:
            out.append(Observation(tuple(p), f"g{idx}"))
    return out


def random_observations(rng, n_groups, size_range=(5, 30), p=2, spread=0.0):
    obs = []
    for g in range(n_groups):
        n = int(rng.integers(*size_range))
        base = rng.normal(spread * g, 1.0, (n, p))
        for row in base:
            obs.append(Observation(tuple(row), f"g{g}"))
    return obs


class TestScatter:
    def test_hand_example(self):
        within, between = scatter_matrices(obs_from_groups(HAND_A, HAND_B))
        assert within == pytest.approx(np.array([[4.0, 1.0], [1.0, 4 / 3]]), abs=1e-12)
        assert between == pytest.approx(np.array([[24.0, 2.0], [2.0, 1 / 6]]), abs=1e-12)

    def test_decomposition_w_plus_b_is_total(self, rng):
        for _ in range(20):
            obs = random_observations(rng, 3)
            within, between = scatter_matrices(obs)
            x = np.array([o.values for o in obs])
            centered = x - x.mean(axis=0)
            total = centered.T @ centered
            assert within + between == pytest.approx(total, rel=1e-9)

    def test_validation(self):
        with pytest.raises(ValidationError):
            scatter_matrices([])
        with pytest.raises(ValidationError, match="2 groups"):
            scatter_matrices([Observation((1.0, 2.0), "a"), Observation((2.0, 1.0), "a")])
        with pytest.raises(ValidationError, match="dimensionality"):
            scatter_matrices([Observation((1.0,), "a"), Observation((1.0, 2.0), "b")])


class TestWilksLambda:
    def test_hand_example(self):
        within, between = scatter_matrices(obs_from_groups(HAND_A, HAND_B))
        assert wilks_lambda(within, between) == pytest.approx(13 / 99, rel=1e-12)

    def test_identical_groups_lambda_one(self):
        within, between = scatter_matrices(obs_from_groups(HAND_A, HAND_A))
        assert wilks_lambda(within, between) == pytest.approx(1.0, abs=1e-12)

    def test_perfect_separation_lambda_zero(self):
        obs = obs_from_groups(
            [(0.0, 0.0)] * 2, [(1.0, 0.0)] * 2, [(0.0, 1.0)] * 2
        )
        within, between = scatter_matrices(obs)
        assert wilks_lambda(within, between) == 0.0

    def test_affine_equivariance(self, rng):
        obs = random_observations(rng, 4, spread=0.5)
        within, between = scatter_matrices(obs)
        lam = wilks_lambda(within, between)
        matrix = np.array([[2.0, 0.7], [-0.3, 1.4]])
        shift = np.array([5.0, -3.0])
        mapped = [
            Observation(tuple(matrix @ np.array(o.values) + shift), o.group)
            for o in obs
        ]
        w2, b2 = scatter_matrices(mapped)
        assert wilks_lambda(w2, b2) == pytest.approx(lam, rel=1e-9)

    def test_range_invariant(self, rng):
        for _ in range(30):
            obs = random_observations(rng, 3, spread=rng.uniform(0, 2))
            within, between = scatter_matrices(obs)
            assert 0.0 <= wilks_lambda(within, between) <= 1.0

    def test_singular_total_scatter_rejected(self):
        # second variable is constant: zero row and column everywhere
        obs = [
            Observation((v, 3.0), g)
            for g, vals in (("a", (0.0, 1.0, 2.0)), ("b", (4.0, 5.0, 7.0)))
            for v in vals
        ]
        within, between = scatter_matrices(obs)
        with pytest.raises(NumericalError, match="singular"):
            wilks_lambda(within, between)


class TestRaoF:
    def test_published_shape(self):
        f_stat, df1, df2 = rao_f(0.68, 2, 8, 775)
        assert (df1, df2) == (14, 1532.0)
        assert 23.1 <= f_stat <= 23.6

    def test_lambda_one_gives_zero_f(self):
        f_stat, _, _ = rao_f(1.0, 2, 3, 30)
        assert f_stat == 0.0

    def test_two_group_fallback_dfs(self):
        # p = 2, g = 2 puts s on its fallback branch: df = (2, n - 3)
        _, df1, df2 = rao_f(0.5, 2, 2, 20)
        assert (df1, df2) == (2, 17.0)

    def test_exact_p2_exponent(self):
        # for p = 2, g > 3: s = 2 and df2 = 2 (N - g - 1)
        _, df1, df2 = rao_f(0.5, 2, 5, 100)
        assert (df1, df2) == (8, 188.0)

    def test_monotone_decreasing_in_lambda(self):
        fs = [rao_f(lam, 2, 4, 50)[0] for lam in (0.1, 0.3, 0.6, 0.9, 1.0)]
        assert fs == sorted(fs, reverse=True)
        assert all(f >= 0 for f in fs)

    def test_validation(self):
        with pytest.raises(NumericalError):
            rao_f(0.0, 2, 3, 30)
        with pytest.raises(NumericalError):
            rao_f(1.5, 2, 3, 30)
        with pytest.raises(ValidationError):
            rao_f(0.5, 2, 3, 3)


class TestHotelling:
    def test_identical_groups(self):
        t2, f_stat, df1, df2, p = hotelling_t2(HAND_A, HAND_A)
        assert t2 == pytest.approx(0.0, abs=1e-12)
        assert p == pytest.approx(1.0, abs=1e-12)

    def test_univariate_equals_pooled_t_test(self, rng):
        for _ in range(20):
            a = rng.normal(0.0, 1.0, (int(rng.integers(4, 20)), 1))
            b = rng.normal(0.4, 1.3, (int(rng.integers(4, 20)), 1))
            t2, f_stat, df1, df2, p = hotelling_t2(a, b)
            n_a, n_b = len(a), len(b)
            nu = n_a + n_b - 2
            sp2 = (
                ((a - a.mean()) ** 2).sum() + ((b - b.mean()) ** 2).sum()
            ) / nu
            t = (a.mean() - b.mean()) / math.sqrt(sp2 * (1 / n_a + 1 / n_b))
            two_sided = float(
                2
                * mpmath.betainc(
                    nu / 2,
                    nu / 2,
                    0,
                    0.5 - abs(t) / (2 * mpmath.sqrt(nu + t * t)),
                    regularized=True,
                )
            )
            assert t2 == pytest.approx(float(t * t), rel=1e-9)
            assert p == pytest.approx(two_sided, rel=1e-8)

    def test_two_group_manova_identity(self, rng):
        for _ in range(50):
            a = rng.normal(0.0, 1.0, (int(rng.integers(5, 30)), 2))
            b = rng.normal(0.5, 1.0, (int(rng.integers(5, 30)), 2))
            t2, *_ = hotelling_t2(a, b)
            obs = obs_from_groups(a, b)
            within, between = scatter_matrices(obs)
            lam = wilks_lambda(within, between)
            n = len(a) + len(b)
            assert lam == pytest.approx(1 / (1 + t2 / (n - 2)), rel=1e-9)

    def test_singular_pooled_covariance(self):
        a = [(1.0, 2.0)] * 4
        b = [(2.0, 4.0)] * 4
        with pytest.raises(NumericalError, match="singular"):
            hotelling_t2(a, b)

    def test_validation(self):
        with pytest.raises(ValidationError):
            hotelling_t2([(1.0, 2.0)], [(2.0, 1.0)])


class TestHolm:
    def test_single_value_unchanged(self):
        assert holm_adjust([0.5]) == [0.5]

    def test_hand_case(self):
        assert holm_adjust([0.01, 0.04, 0.03]) == pytest.approx([0.03, 0.06, 0.06])

    def test_clipped_at_one(self):
        assert holm_adjust([0.9, 0.8]) == [1.0, 1.0]

    def test_dominance_and_monotone(self, rng):
        for _ in range(50):
            raw = rng.uniform(0, 1, int(rng.integers(1, 10))).tolist()
            adjusted = holm_adjust(raw)
            assert all(a >= r for a, r in zip(adjusted, raw))
            pairs = sorted(zip(raw, adjusted))
            adj_sorted = [a for _, a in pairs]
            assert adj_sorted == sorted(adj_sorted)

    def test_input_order_preserved(self):
        raw = [0.04, 0.01, 0.03]
        assert holm_adjust(raw) == pytest.approx([0.06, 0.03, 0.06])

    def test_validation(self):
        with pytest.raises(ValueError):
            holm_adjust([0.5, 1.2])


class TestManovaReport:
    def _features(self):
        rows = []
        rng = np.random.default_rng(7)
        means = {"a": (10.0, 1.0), "b": (20.0, 2.0), "c": (15.0, 3.0)}
        for cat, (mc, me) in means.items():
            for i in range(10):
                rows.append(
                    WindowFeature(
                        song_id=f"{cat}{i}",
                        category=cat,
                        window_index=0,
                        motif_count=float(mc + rng.normal(0, 1)),
                        duration_entropy_bits=float(me + rng.normal(0, 0.2)),
                    )
                )
        return FeatureTable(tuple(rows))

    def test_report_fields(self):
        report = manova(self._features())
        assert report.n_vars == 2
        assert report.n_groups == 3
        assert report.n_obs == 30
        assert report.df1 == 2 * 2
        assert 0.0 <= report.wilks_lambda <= 1.0
        assert report.p_value < 0.001
        assert len(report.posthoc) == 3
        assert [gs.group for gs in report.group_means] == ["a", "b", "c"]

    def test_posthoc_pairs_and_holm(self):
        report = manova(self._features())
        pairs = [(ph.group_a, ph.group_b) for ph in report.posthoc]
        assert pairs == [("a", "b"), ("a", "c"), ("b", "c")]
        raw = [ph.p_raw for ph in report.posthoc]
        assert [ph.p_holm for ph in report.posthoc] == pytest.approx(holm_adjust(raw))

    def test_posthoc_none_keeps_raw(self):
        report = manova(self._features(), posthoc="none")
        for ph in report.posthoc:
            assert ph.p_holm == ph.p_raw

    def test_p_recomputable_from_statistic(self):
        report = manova(self._features())
        assert report.p_value == f_survival(report.f_stat, report.df1, report.df2)

    def test_expect_groups_note(self):
        report = manova(self._features(), expect_groups=8)
        assert any("3 groups" in n and "8" in n for n in report.notes)
        assert manova(self._features(), expect_groups=3).notes == ()

    def test_per_song_averages_windows(self):
        rows = (
            WindowFeature("s1", "a", 0, 10.0, 1.0),
            WindowFeature("s1", "a", 1, 14.0, 3.0),
            WindowFeature("s2", "a", 0, 11.0, 1.5),
            WindowFeature("s3", "b", 0, 30.0, 0.5),
            WindowFeature("s4", "b", 0, 31.0, 0.8),
            WindowFeature("s5", "b", 0, 29.0, 0.7),
            WindowFeature("s6", "a", 0, 12.0, 2.0),
        )
        report = manova(FeatureTable(rows), per_song=True)
        assert report.n_obs == 6
        means = {gs.group: gs.mean for gs in report.group_means}
        # s1 contributes its window average (12.0, 2.0)
        assert means["a"][0] == pytest.approx((12.0 + 11.0 + 12.0) / 3)

    def test_group_size_minimum(self):
        rows = (
            WindowFeature("s1", "a", 0, 10.0, 1.0),
            WindowFeature("s2", "a", 0, 11.0, 1.2),
            WindowFeature("s3", "b", 0, 30.0, 0.5),
        )
        with pytest.raises(ValidationError, match="b"):
            manova(FeatureTable(rows))

    def test_too_few_observations(self):
        obs = obs_from_groups([(0.0, 1.0), (1.0, 0.0)], [(5.0, 5.0), (6.0, 4.0)])
        with pytest.raises(ValidationError, match="observations"):
            manova_observations(obs)

    def test_two_group_p_equals_hotelling(self, rng):
        for _ in range(50):
            a = rng.normal(0.0, 1.0, (int(rng.integers(5, 30)), 2))
            b = rng.normal(0.3, 1.0, (int(rng.integers(5, 30)), 2))
            report = manova_observations(obs_from_groups(a, b))
            *_, p_hot = hotelling_t2(a, b)
            assert report.p_value == pytest.approx(p_hot, abs=1e-9)


class TestRenderers:
    def _report(self):
        return manova_observations(obs_from_groups(HAND_A, HAND_B), expect_groups=8)

    def test_text_mentions_key_quantities(self):
        text = report_text(self._report())
        assert "Wilks lambda: 0.131313" in text
        assert "Rao F(2, 3)" in text
        assert "g0 vs g1" in text
        assert "note: data contains 2 groups where 8 were expected" in text

    def test_json_round_trips(self):
        payload = json.loads(report_json(self._report()))
        assert payload["n_groups"] == 2
        assert payload["wilks_lambda"] == pytest.approx(13 / 99)
        assert len(payload["posthoc"]) == 1
        assert np.array(payload["within"]) == pytest.approx(
            np.array([[4.0, 1.0], [1.0, 4 / 3]])
        )

    def test_omnibus_csv_layout(self):
        lines = omnibus_csv(self._report()).splitlines()
        assert lines[0] == "n_vars,n_groups,n_obs,wilks_lambda,f_stat,df1,df2,p_value"
        fields = lines[1].split(",")
        assert fields[:3] == ["2", "2", "6"]
        assert float(fields[3]) == pytest.approx(13 / 99)
        assert fields[5] == "2" and fields[6] == "3"

    def test_posthoc_csv_layout(self):
        lines = posthoc_csv(self._report()).splitlines()
        assert lines[0] == "group_a,group_b,t2,f,df1,df2,p_raw,p_holm"
        assert lines[1].startswith("g0,g1,")

    def test_identical_groups_near_one_p(self):
        report = manova_observations(obs_from_groups(HAND_A, HAND_A))
        assert report.wilks_lambda == pytest.approx(1.0, abs=1e-12)
        assert report.p_value == pytest.approx(1.0, abs=1e-9)
