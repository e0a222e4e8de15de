"""
Unit tests for the statistics module.
"""

import math

import numpy as np
import pytest

from symtrunc.utils.statistics import fit_regression, geometric_grid, log_grid, loglog_slope, relative_drift


class TestFitRegression:
    """Tests for the fit_regression function."""

    def test_linear(self):
        """Test recovery of an exact line."""
        x = np.linspace(0.0, 1.0, 11)
        coeffs, poly = fit_regression(x, 3.0 * x - 1.0)
        np.testing.assert_allclose(coeffs, [3.0, -1.0], atol=1e-12)
        assert poly(2.0) == pytest.approx(5.0)

    def test_quadratic(self):
        x = np.linspace(-1.0, 1.0, 9)
        coeffs, _ = fit_regression(x, x ** 2, degree=2)
        np.testing.assert_allclose(coeffs, [1.0, 0.0, 0.0], atol=1e-12)


class TestLogLogSlope:
    """Tests for the loglog_slope function."""

    def test_power_law(self):
        a = np.geomspace(1e-6, 1.0, 20)
        assert loglog_slope(a, 2.0 * a ** (-1.0 / 24.0)) == pytest.approx(-1.0 / 24.0)

    @pytest.mark.parametrize("x, y", [([1.0], [1.0]), ([0.0, 1.0], [1.0, 2.0]), ([1.0, 2.0], [1.0, -1.0])])
    def test_rejects_points(self, x, y):
        with pytest.raises(ValueError):
            loglog_slope(np.array(x), np.array(y))


class TestRelativeDrift:
    """Tests for the relative_drift function."""

    @pytest.mark.parametrize(
        "coarse, fine, expected",
        [(1.0, 1.1, 0.1 / 1.1), (2.0, 1.0, 0.5), (0.0, 0.0, 0.0), (1.0, math.inf, math.inf), (math.nan, 1.0, math.inf)],
    )
    def test_values(self, coarse, fine, expected):
        assert relative_drift(coarse, fine) == pytest.approx(expected)

    def test_symmetric(self):
        assert relative_drift(0.3, 0.4) == relative_drift(0.4, 0.3)


class TestGrids:
    """Tests for the logarithmic and geometric grids."""

    def test_log_grid(self):
        grid = log_grid(1e-3, 1.0, 50)
        assert len(grid) == 50
        assert grid[0] == pytest.approx(1e-3)
        assert grid[-1] == 1.0
        assert np.all(np.diff(grid) > 0)

    @pytest.mark.parametrize("lower, upper", [(0.0, 1.0), (1.0, 1.0), (0.5, 0.1)])
    def test_log_grid_rejects(self, lower, upper):
        with pytest.raises(ValueError):
            log_grid(lower, upper)

    def test_geometric_grid(self):
        grid = geometric_grid(1.0, 1e-3, 0.5)
        assert grid[0] == 1.0
        assert grid[-1] <= 1e-3
        assert grid[-2] > 1e-3
        np.testing.assert_allclose(grid[1:] / grid[:-1], 0.5)

    @pytest.mark.parametrize("ratio", [0.0, 1.0, 1.5])
    def test_geometric_grid_rejects(self, ratio):
        with pytest.raises(ValueError):
            geometric_grid(1.0, 1e-3, ratio)
