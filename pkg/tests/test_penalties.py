"""Tests for the SCAD/MCP penalty functions and the scalar SCAD thresholder."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from segline.penalties import (
    mcp_derivative,
    mcp_penalty,
    scad_derivative,
    scad_penalty,
    scad_threshold_scalar,
)


class TestScadPenalty:
    @pytest.mark.parametrize(
        "x,expected",
        [
            (0.5, 0.5),
            (2.0, (3.7 * 2 - 0.5 * (4 + 1)) / 2.7),
            (10.0, 1.0 * 4.7 / 2),
        ],
    )
    def test_branch_values(self, x, expected):
        assert scad_penalty(x, 1.0, 3.7) == pytest.approx(expected, abs=1e-10)

    def test_continuity_at_branch_points(self):
        lam, gamma = 0.8, 3.7
        eps = 1e-9
        for point in (lam, gamma * lam):
            left = scad_penalty(point - eps, lam, gamma)
            right = scad_penalty(point + eps, lam, gamma)
            assert abs(left - right) < 1e-7

    def test_derivative_continuity(self):
        lam, gamma = 0.8, 3.7
        eps = 1e-9
        for point in (lam, gamma * lam):
            left = scad_derivative(point - eps, lam, gamma)
            right = scad_derivative(point + eps, lam, gamma)
            assert abs(left - right) < 1e-6

    def test_flat_beyond_gamma_lambda(self):
        lam, gamma = 1.0, 3.7
        cap = lam**2 * (gamma + 1) / 2
        for x in (3.8, 10.0, 1000.0):
            assert scad_penalty(x, lam, gamma) == pytest.approx(cap)
            assert scad_derivative(x, lam, gamma) == 0.0

    @given(st.floats(min_value=0.0, max_value=20.0))
    def test_nondecreasing(self, x):
        lam, gamma = 0.5, 3.7
        assert scad_penalty(x + 1e-3, lam, gamma) >= scad_penalty(x, lam, gamma) - 1e-12

    def test_rejects_negative_x(self):
        with pytest.raises(ValueError):
            scad_penalty(-0.1, 1.0, 3.7)

    def test_rejects_small_gamma(self):
        with pytest.raises(ValueError):
            scad_penalty(1.0, 1.0, 2.0)


class TestMcpPenalty:
    @pytest.mark.parametrize(
        "x,expected",
        [(0.0, 0.0), (1.0, 1.0 - 1.0 / 4.8), (5.0, 0.5 * 2.4)],
    )
    def test_branch_values(self, x, expected):
        assert mcp_penalty(x, 1.0, 2.4) == pytest.approx(expected, abs=1e-10)

    def test_continuity_and_derivative_at_branch(self):
        lam, gamma = 0.7, 2.4
        point = gamma * lam
        eps = 1e-9
        assert abs(
            mcp_penalty(point - eps, lam, gamma) - mcp_penalty(point + eps, lam, gamma)
        ) < 1e-7
        assert abs(
            mcp_derivative(point - eps, lam, gamma)
            - mcp_derivative(point + eps, lam, gamma)
        ) < 1e-6

    def test_flat_beyond_gamma_lambda(self):
        lam, gamma = 1.0, 2.4
        for x in (2.5, 100.0):
            assert mcp_penalty(x, lam, gamma) == pytest.approx(gamma * lam**2 / 2)

    def test_rejects_small_gamma(self):
        with pytest.raises(ValueError):
            mcp_penalty(1.0, 1.0, 1.0)


class TestScadThresholdScalar:
    @pytest.mark.parametrize(
        "z,expected",
        [(0.01, 0.0), (1.0, 1.0), (-0.03, -0.01)],
    )
    def test_reference_values(self, z, expected):
        assert scad_threshold_scalar(z, 0.02, 3.7) == pytest.approx(expected, abs=1e-12)

    @given(st.floats(min_value=-1.0, max_value=1.0))
    def test_odd_function(self, z):
        lam, gamma = 0.02, 3.7
        assert scad_threshold_scalar(-z, lam, gamma) == pytest.approx(
            -scad_threshold_scalar(z, lam, gamma), abs=1e-15
        )

    def test_matches_grid_minimization(self):
        # univariate objective 0.5 (z - mu)^2 + scad(|mu|)
        lam, gamma = 0.02, 3.7
        grid = np.arange(-1.2, 1.2, 1e-5)
        pen = np.array([scad_penalty(abs(m), lam, gamma) for m in grid])
        for z in np.linspace(-1.0, 1.0, 41):
            obj = 0.5 * (z - grid) ** 2 + pen
            mu_grid = grid[int(np.argmin(obj))]
            mu = scad_threshold_scalar(float(z), lam, gamma)
            assert abs(mu - mu_grid) < 1e-4

    def test_identity_region(self):
        lam, gamma = 0.02, 3.7
        for z in (0.1, -0.5, 0.075):
            assert scad_threshold_scalar(z, lam, gamma) == pytest.approx(z)
