"""
Tests for the input validation module.
"""

import math

import numpy as np
import pytest

from symtrunc.core.validation import (
    ConfigValidator,
    check_breakpoints,
    check_exponents,
    check_finite,
    check_interval_family,
    check_nonnegative,
    check_weights,
    optional_float,
)


def test_check_finite():
    """Test the finiteness check and its message."""
    check_finite(np.array([0.0, 1.0]), "values")
    with pytest.raises(ValueError, match="2 non-finite"):
        check_finite(np.array([np.nan, np.inf, 1.0]), "values")


def test_check_nonnegative():
    check_nonnegative(np.zeros(3), "values")
    with pytest.raises(ValueError, match="nonnegative"):
        check_nonnegative(np.array([0.0, -1e-3]), "values")


@pytest.mark.parametrize(
    "breakpoints, n_values",
    [
        ([0.0, 0.5, 1.0], 3),
        ([0.1, 0.5, 1.0], 2),
        ([0.0, 0.5, 0.9], 2),
        ([0.0, 0.5, 0.5, 1.0], 3),
        ([0.0], 0),
    ],
)
def test_check_breakpoints_rejects(breakpoints, n_values):
    with pytest.raises(ValueError):
        check_breakpoints(np.asarray(breakpoints), n_values)


def test_check_breakpoints_accepts():
    check_breakpoints(np.array([0.0, 0.25, 1.0]), 2)


@pytest.mark.parametrize(
    "p, q, flavor",
    [(0.5, 1.0, "classical"), (2.0, math.nan, "classical"), (math.inf, 2.0, "classical"), (2.0, 2.0, "weak")],
)
def test_check_exponents_rejects(p, q, flavor):
    with pytest.raises(ValueError):
        check_exponents(p, q, flavor)


def test_check_exponents_oscillation_endpoint():
    """L(inf, q) is admissible in the oscillation flavor only."""
    check_exponents(math.inf, 2.0, "oscillation")
    check_exponents(math.inf, math.inf, "classical")


def test_check_weights():
    weights = check_weights(np.full(4, 0.25), 4)
    np.testing.assert_allclose(weights, 0.25)
    with pytest.raises(ValueError, match="one entry per cell"):
        check_weights(np.full(3, 1.0 / 3.0), 4)
    with pytest.raises(ValueError, match="strictly positive"):
        check_weights(np.array([0.5, 0.5, 0.0, 0.0]), 4)
    with pytest.raises(ValueError, match="sum to 1"):
        check_weights(np.full(4, 0.3), 4)


def test_check_interval_family():
    check_interval_family([0.1, 0.5], [0.5, 0.9])
    with pytest.raises(ValueError, match="strictly after 0"):
        check_interval_family([0.0], [1.0])
    with pytest.raises(ValueError, match="disjoint"):
        check_interval_family([0.1, 0.4], [0.5, 0.9])
    with pytest.raises(ValueError, match="matching"):
        check_interval_family([0.1, 0.4], [0.5])


@pytest.mark.parametrize(
    "text, expected",
    [("2", 2.0), (" inf ", math.inf), ("Infinity", math.inf), ("none", None), (None, None), ("1.5", 1.5)],
)
def test_optional_float(text, expected):
    assert optional_float(text) == expected


class TestConfigValidator:
    """
    Test class for the configuration validator.
    """

    def test_valid_configuration(self):
        config = {
            "domains": {"shapes": ["interval", "s_john"], "resolutions": [16, 32]},
            "battery": {"kind": "radial"},
            "spaces": {"theorem_a": ["L1", "L(2,inf)"], "corollary": "Linf"},
        }
        assert ConfigValidator().validate(config) == {}

    def test_collects_issues(self):
        config = {
            "domains": {"shapes": ["hexagon"], "resolutions": [32]},
            "exponents": {"p": 0.5},
            "battery": {"kind": "smooth", "n_random": -1},
            "majorize": {"n_pairs": 0},
        }
        issues = ConfigValidator().validate(config)
        assert set(issues) == {"shapes", "resolutions", "exponents", "battery", "majorize"}
        assert len(issues["battery"]) == 2

    def test_min_resolution(self):
        config = {"domains": {"resolutions": [16, 32]}}
        assert "resolutions" in ConfigValidator(min_resolution=24).validate(config)
