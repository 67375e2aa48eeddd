"""Tests for the max-over-splits statistic, its threshold, and refinement."""

import numpy as np
import pytest

from segline.cusum import (
    MIN_THRESHOLD_WINDOW,
    CusumWindow,
    cusum_statistic,
    cusum_test,
    cusum_threshold,
    refine_changepoint,
)
from segline.model import Dataset


def _random_instance(rng, n_max=200, q_max=3, shift=None):
    q = int(rng.integers(1, q_max + 1))
    n = int(rng.integers(4 * q + 8, n_max + 1))
    x = np.hstack([np.ones((n, 1)), rng.normal(size=(n, q - 1))]) if q > 1 else np.ones((n, 1))
    y = rng.normal(size=n)
    if shift is not None:
        y[n // 2 :] += shift
    return Dataset(x=x, y=y)


def _direct_statistic(data, w):
    """O(N^2) oracle: fresh OLS fits on both sides for every split."""
    lo, hi = w.lo, w.hi
    xw, yw = data.rows(lo, hi)
    big = xw.T @ xw
    n_w = len(yw)
    q = data.q

    def rss(x, y):
        beta = np.linalg.pinv(x.T @ x) @ (x.T @ y)
        r = y - x @ beta
        return float(r @ r)

    full = rss(xw, yw)
    best, best_k = -np.inf, -1
    for t in range(q, n_w - q):
        split = rss(xw[: t + 1], yw[: t + 1]) + rss(xw[t + 1 :], yw[t + 1 :])
        stat = full - split  # equals T_{l,k} = N(sigma2_l - sigma2_{l,k})
        if stat > best:
            best, best_k = stat, t
    return best, lo + best_k


class TestCusumStatistic:
    def test_exact_fit_is_zero(self):
        x = np.hstack([np.ones((60, 1)), np.arange(60.0)[:, None]])
        data = Dataset(x=x, y=x @ np.array([2.0, -0.3]))
        t_stat, _, _ = cusum_statistic(data, CusumWindow(1, 60))
        assert t_stat == pytest.approx(0.0, abs=1e-8)

    def test_matches_direct_oracle(self):
        rng = np.random.Generator(np.random.Philox(21))
        for _ in range(100):
            data = _random_instance(rng)
            w = CusumWindow(1, data.n)
            t_rec, k_rec, _ = cusum_statistic(data, w)
            t_dir, k_dir = _direct_statistic(data, w)
            assert t_rec == pytest.approx(t_dir, abs=1e-6)
            assert k_rec == k_dir

    def test_rss_difference_identity(self):
        rng = np.random.Generator(np.random.Philox(5))
        data = _random_instance(rng, shift=1.0)
        w = CusumWindow(1, data.n)
        t_stat, k_hat, _ = cusum_statistic(data, w)
        xw, yw = data.rows(w.lo, w.hi)
        n_w = len(yw)

        def rss(x, y):
            beta = np.linalg.pinv(x.T @ x) @ (x.T @ y)
            r = y - x @ beta
            return float(r @ r)

        sigma2_full = rss(xw, yw) / n_w
        t = k_hat - w.lo
        sigma2_split = (rss(xw[: t + 1], yw[: t + 1]) + rss(xw[t + 1 :], yw[t + 1 :])) / n_w
        assert t_stat == pytest.approx(n_w * (sigma2_full - sigma2_split), abs=1e-6)

    def test_window_too_short(self):
        data = Dataset(x=np.ones((10, 3)), y=np.zeros(10))
        with pytest.raises(ValueError, match="too short"):
            cusum_statistic(data, CusumWindow(1, 7))

    def test_shift_by_common_coefficient_invariant(self):
        rng = np.random.Generator(np.random.Philox(9))
        q = 3
        x = np.hstack([np.ones((120, 1)), rng.normal(size=(120, q - 1))])
        y = rng.normal(size=120)
        c = np.array([0.5, -1.0, 2.0])
        t1, k1, _ = cusum_statistic(Dataset(x=x, y=y), CusumWindow(1, 120))
        t2, k2, _ = cusum_statistic(Dataset(x=x, y=y + x @ c), CusumWindow(1, 120))
        assert t1 == pytest.approx(t2, abs=1e-8)
        assert k1 == k2


class TestCusumThreshold:
    def test_reference_value(self):
        assert cusum_threshold(1000, 1, 0.05) == pytest.approx(10.26113, abs=1e-4)

    def test_gumbel_inversion_constant(self):
        import math

        assert 2.0 * math.log(-2.0 / math.log(0.95)) == pytest.approx(7.32652, abs=1e-4)

    def test_monotone_in_alpha(self):
        vals = [cusum_threshold(500, 2, a) for a in (0.01, 0.05, 0.10, 0.20)]
        assert vals == sorted(vals, reverse=True)

    def test_increasing_in_q(self):
        vals = [cusum_threshold(500, q, 0.05) for q in range(1, 7)]
        assert vals == sorted(vals)

    def test_short_window_rejected(self):
        with pytest.raises(ValueError):
            cusum_threshold(MIN_THRESHOLD_WINDOW, 1, 0.05)


class TestCusumTest:
    def test_noiseless_change_detected(self):
        y = np.zeros(100)
        y[50:] = 3.0
        data = Dataset(x=np.ones((100, 1)), y=y)
        out = cusum_test(data, CusumWindow(1, 100), 0.05)
        assert out.reject
        assert out.k_hat == 50

    def test_strong_shift_power(self):
        rng = np.random.Generator(np.random.Philox(33))
        rejections = 0
        for _ in range(100):
            y = rng.normal(size=500)
            y[250:] += 1.0
            data = Dataset(x=np.ones((500, 1)), y=y)
            if cusum_test(data, CusumWindow(1, 500), 0.05).reject:
                rejections += 1
        assert rejections >= 95

    def test_reject_iff_above_threshold(self):
        rng = np.random.Generator(np.random.Philox(17))
        for _ in range(20):
            data = _random_instance(rng, n_max=120)
            out = cusum_test(data, CusumWindow(1, data.n), 0.05)
            assert out.reject == (out.statistic > out.threshold)


class TestRefineChangepoint:
    def test_noiseless_mean_shift(self):
        y = np.zeros(100)
        y[50:] = 1.0  # change after index 50 (1-based)
        data = Dataset(x=np.ones((100, 1)), y=y)
        assert refine_changepoint(data, (40, 60)) == 50

    def test_matches_exhaustive_search(self):
        rng = np.random.Generator(np.random.Philox(71))
        for _ in range(200):
            data = _random_instance(rng, n_max=120)
            lo = int(rng.integers(1, max(2, data.n // 4)))
            hi = min(lo + int(rng.integers(4 * data.q + 6, 60)), data.n)
            if hi - lo + 1 < 2 * (data.q + 1):
                continue
            got = refine_changepoint(data, (lo, hi))
            xw, yw = data.rows(lo, hi)
            n_w = len(yw)
            best, best_t = np.inf, None

            def rss(x, y):
                beta = np.linalg.pinv(x.T @ x) @ (x.T @ y)
                r = y - x @ beta
                return float(r @ r)

            for t in range(data.q, n_w - 1 - data.q):
                val = rss(xw[: t + 1], yw[: t + 1]) + rss(xw[t + 1 :], yw[t + 1 :])
                if val < best:
                    best, best_t = val, t
            assert got == lo + best_t

    def test_tie_breaks_to_smallest(self):
        # symmetric V shape: two splits with equal residual
        y = np.array([0.0] * 8 + [4.0] + [0.0] * 8)
        data = Dataset(x=np.ones((17, 1)), y=y)
        got = refine_changepoint(data, (1, 17))
        xw, yw = data.rows(1, 17)

        def rss(v):
            return float(((v - v.mean()) ** 2).sum())

        splits = [
            (t, rss(yw[: t + 1]) + rss(yw[t + 1 :]))
            for t in range(1, 15)
        ]
        best = min(s for _, s in splits)
        smallest = min(t for t, s in splits if s == pytest.approx(best))
        assert got == 1 + smallest

    def test_inside_admissible_range(self):
        rng = np.random.Generator(np.random.Philox(99))
        for _ in range(50):
            data = _random_instance(rng, n_max=80)
            got = refine_changepoint(data, (1, data.n))
            assert 1 + data.q <= got <= data.n - 1 - data.q

    def test_window_clipped(self):
        rng = np.random.Generator(np.random.Philox(3))
        data = _random_instance(rng, n_max=60, q_max=1)
        got = refine_changepoint(data, (-10, data.n + 10))
        assert 1 <= got < data.n
