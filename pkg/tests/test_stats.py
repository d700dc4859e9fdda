import numpy as np
import pytest

import pmpfleet as pf
from pmpfleet import ValidationError

from oracles import regression_r_squared, wilcoxon_brute


class TestEvaluatePredictions:
    def test_known_vectors(self):
        res = pf.evaluate_predictions([1.1, 1.9, 3.2, 3.8], [1.0, 2.0, 3.0, 4.0])
        assert res.r == pytest.approx(0.9908470001860923, rel=1e-13)
        assert res.r_squared == pytest.approx(0.981777777777778, rel=1e-13)
        assert res.n == 4

    def test_perfect_fit(self):
        res = pf.evaluate_predictions([2.0, 4.0, 6.0], [2.0, 4.0, 6.0])
        assert res.r == pytest.approx(1.0, abs=1e-14)
        assert res.r_squared == pytest.approx(1.0, abs=1e-14)

    def test_sign_flip(self):
        res = pf.evaluate_predictions([3.0, 2.0, 1.0], [1.0, 2.0, 3.0])
        assert res.r == pytest.approx(-1.0, abs=1e-14)
        assert res.r_squared == pytest.approx(1.0, abs=1e-14)

    def test_matches_regression_fit(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            n = int(rng.integers(3, 40))
            obs = rng.normal(size=n)
            pred = 0.8 * obs + rng.normal(scale=0.5, size=n)
            if np.std(pred) == 0.0 or np.std(obs) == 0.0:
                continue
            res = pf.evaluate_predictions(pred, obs)
            assert res.r_squared == pytest.approx(
                regression_r_squared(pred, obs), rel=1e-9, abs=1e-12
            )

    def test_constant_series_rejected(self):
        with pytest.raises(ValidationError):
            pf.evaluate_predictions([1.0, 1.0, 1.0], [1.0, 2.0, 3.0])

    def test_too_short(self):
        with pytest.raises(ValidationError):
            pf.evaluate_predictions([1.0], [2.0])

    def test_length_mismatch(self):
        with pytest.raises(ValidationError):
            pf.evaluate_predictions([1.0, 2.0], [1.0, 2.0, 3.0])


class TestWilcoxonFixtures:
    def test_all_positive_n5(self):
        res = pf.wilcoxon_signed_rank([1.0, 2.0, 0.5, 3.0, 1.5])
        assert res.statistic == 15.0
        assert res.p_value == pytest.approx(0.0625, abs=1e-12)
        assert res.n == 5
        assert res.method == "exact"

    def test_tied_magnitudes(self):
        diffs = [1.5, -1.5, 2.0, 3.0, -0.5, 2.0]
        res = pf.wilcoxon_signed_rank(diffs)
        assert res.statistic == pytest.approx(17.5, abs=1e-12)
        assert res.p_value == pytest.approx(0.1875, abs=1e-12)

    def test_median_keeps_zero_differences(self):
        res = pf.wilcoxon_signed_rank([0.0, 0.0, 2.0, 4.0])
        assert res.n == 2  # zeros dropped from the ranking
        assert res.median_difference == pytest.approx(1.0)  # but not from the median

    def test_paired_form(self):
        obs = np.array([5.0, 7.0, 6.5, 8.0])
        pred = np.array([4.0, 7.5, 6.0, 7.0])
        a = pf.wilcoxon_signed_rank(obs, pred)
        b = pf.wilcoxon_signed_rank(obs - pred)
        assert (a.statistic, a.p_value) == (b.statistic, b.p_value)
        assert a.median_difference == pytest.approx(np.median(obs - pred))

    def test_all_zero_rejected(self):
        with pytest.raises(ValidationError):
            pf.wilcoxon_signed_rank([0.0, 0.0, 0.0])

    def test_bad_method(self):
        with pytest.raises(ValidationError):
            pf.wilcoxon_signed_rank([1.0, -2.0, 3.0], method="montecarlo")


class TestWilcoxonAgainstEnumeration:
    def test_random_small_samples(self):
        rng = np.random.default_rng(11)
        for trial in range(40):
            n = int(rng.integers(2, 11))
            diffs = np.round(rng.normal(scale=2.0, size=n), 1)
            diffs = diffs[diffs != 0.0]
            if len(diffs) < 2:
                continue
            res = pf.wilcoxon_signed_rank(diffs, method="exact")
            stat, p = wilcoxon_brute(diffs)
            assert res.statistic == pytest.approx(stat, abs=1e-9), f"trial {trial}"
            assert res.p_value == pytest.approx(p, abs=1e-12), f"trial {trial}"

    def test_antisymmetry(self):
        rng = np.random.default_rng(13)
        for _ in range(20):
            diffs = rng.normal(size=8)
            a = pf.wilcoxon_signed_rank(diffs, method="exact")
            b = pf.wilcoxon_signed_rank(-diffs, method="exact")
            assert a.p_value == pytest.approx(b.p_value, abs=1e-12)
            total = 8 * 9 / 2
            assert a.statistic + b.statistic == pytest.approx(total, abs=1e-9)

    def test_p_value_bounds(self):
        rng = np.random.default_rng(19)
        for _ in range(30):
            diffs = rng.normal(size=int(rng.integers(2, 12)))
            res = pf.wilcoxon_signed_rank(diffs)
            assert 0.0 < res.p_value <= 1.0


class TestWilcoxonApproximation:
    def test_close_to_exact_at_n20(self):
        rng = np.random.default_rng(23)
        for _ in range(10):
            diffs = rng.normal(loc=0.2, size=20)
            exact = pf.wilcoxon_signed_rank(diffs, method="exact")
            approx = pf.wilcoxon_signed_rank(diffs, method="approx")
            assert approx.p_value == pytest.approx(exact.p_value, abs=0.01)
            assert approx.statistic == exact.statistic

    def test_auto_switches_on_size(self):
        rng = np.random.default_rng(29)
        small = pf.wilcoxon_signed_rank(rng.normal(size=10))
        large = pf.wilcoxon_signed_rank(rng.normal(size=40))
        assert small.method == "exact"
        assert large.method == "approx"

    def test_exact_limit_override(self):
        rng = np.random.default_rng(31)
        diffs = rng.normal(size=30)
        forced = pf.wilcoxon_signed_rank(diffs, method="auto", exact_limit=30)
        assert forced.method == "exact"

    def test_approx_handles_ties(self):
        diffs = np.array([1.0, 1.0, -1.0, 2.0, 2.0, 2.0, -3.0, 4.0] * 4)
        res = pf.wilcoxon_signed_rank(diffs, method="approx")
        assert 0.0 < res.p_value <= 1.0
