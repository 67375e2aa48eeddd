"""Backend parity: the numba kernels must agree with the numpy fallback."""

import numpy as np
import pytest

from segline import _kernels
from segline._kernels import _impl

try:
    from segline._kernels import _numba
except ImportError:  # pragma: no cover
    _numba = None

needs_numba = pytest.mark.skipif(_numba is None, reason="numba unavailable")


def _cd_instance(rng, p=8):
    a = rng.normal(size=(p, p))
    g = a.T @ a + np.eye(p)
    b = rng.normal(size=p)
    lam = np.abs(rng.normal(size=p))
    lam[0] = 0.0
    if rng.random() < 0.3:
        lam[1] = np.inf
    return g, b, lam


def _window(rng, n=120, q=2):
    x = np.hstack([np.ones((n, 1)), rng.normal(size=(n, q - 1))]) if q > 1 else np.ones((n, 1))
    y = rng.normal(size=n)
    y[n // 2 :] += rng.normal()
    return np.ascontiguousarray(x), y


class TestBackendSelection:
    def test_backend_reported(self):
        assert _kernels.BACKEND in ("numba", "numpy")

    def test_exports_match_backend(self):
        mod = _numba if _kernels.BACKEND == "numba" else _impl
        assert _kernels.cusum_scan is mod.cusum_scan
        assert _kernels.split_rss_scan is mod.split_rss_scan
        assert _kernels.cd_weighted_l1 is mod.cd_weighted_l1


@needs_numba
class TestParity:
    def test_cd_weighted_l1(self):
        rng = np.random.Generator(np.random.Philox(1))
        for _ in range(20):
            g, b, lam = _cd_instance(rng)
            t1 = np.zeros_like(b)
            t2 = np.zeros_like(b)
            r1 = _impl.cd_weighted_l1(g, b, lam, t1, 10_000, 1e-10)
            r2 = _numba.cd_weighted_l1(g, b, lam, t2, 10_000, 1e-10)
            assert np.allclose(t1, t2, atol=1e-8)
            assert r1[2] == r2[2] == 1

    def test_cusum_scan(self):
        rng = np.random.Generator(np.random.Philox(2))
        for _ in range(20):
            q = int(rng.integers(1, 4))
            x, y = _window(rng, n=int(rng.integers(40, 160)), q=q)
            t1, k1, s1 = _impl.cusum_scan(x, y, 64)
            t2, k2, s2 = _numba.cusum_scan(x, y, 64)
            assert t1 == pytest.approx(t2, abs=1e-7)
            assert k1 == k2
            assert s1 == s2

    def test_split_rss_scan(self):
        rng = np.random.Generator(np.random.Philox(3))
        for _ in range(20):
            q = int(rng.integers(1, 4))
            x, y = _window(rng, n=int(rng.integers(40, 160)), q=q)
            t1, r1 = _impl.split_rss_scan(x, y)
            t2, r2 = _numba.split_rss_scan(x, y)
            assert t1 == t2
            assert r1 == pytest.approx(r2, abs=1e-7)


class TestCdKernel:
    def test_infinite_penalty_pins_coordinate(self):
        rng = np.random.Generator(np.random.Philox(4))
        g, b, lam = _cd_instance(rng)
        lam[1] = np.inf
        theta = np.zeros_like(b)
        _kernels.cd_weighted_l1(g, b, lam, theta, 10_000, 1e-10)
        assert theta[1] == 0.0

    def test_unpenalized_solves_normal_equations(self):
        rng = np.random.Generator(np.random.Philox(5))
        a = rng.normal(size=(6, 6))
        g = a.T @ a + np.eye(6)
        b = rng.normal(size=6)
        lam = np.zeros(6)
        theta = np.zeros(6)
        kkt, _, converged = _kernels.cd_weighted_l1(g, b, lam, theta, 50_000, 1e-12)
        assert converged == 1
        assert np.allclose(theta, np.linalg.solve(g, b), atol=1e-8)
        assert kkt <= 1e-12
